// Copyright 2026 The TablutZero Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

#include "tablutzero/network.hpp"

namespace tablutzero {

struct OptimizerConfig {
  double peak_lr = 0.002;
  double min_lr = 0.00001;
  std::int64_t warmup_steps = 500;
  std::int64_t total_steps = 102400;
  double weight_decay = 0.0001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const OptimizerConfig&) const = default;
};

// Linear warmup from 0 to peak, cosine decay to min at total_steps, then min.
double lr_at(const OptimizerConfig& cfg, std::int64_t step);

template <typename T>
struct OptState {
  std::int64_t step = 0;  // completed updates
  Params<T> first_moment;
  Params<T> second_moment;
  OptimizerConfig hyper;

  static OptState init(const Params<T>& like, const OptimizerConfig& hyper) {
    return OptState{0, Params<T>(like.config()), Params<T>(like.config()), hyper};
  }
};

// Decoupled-weight-decay Adam with bias correction, learning rate
// lr_at(o.step). Tensors with decay == false (norm parameters and biases) are
// not decayed. Throws TrainingDivergence if any gradient is non-finite; the
// parameters and state are left untouched in that case.
template <typename T>
void adamw_update(Params<T>& p, const Params<T>& grads, OptState<T>& o);

}  // namespace tablutzero
