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

// Dual-head residual network: a shared convolutional trunk feeding a policy
// and a value head for each side.
//
//   stem    conv3x3(43 -> F) - norm - relu
//   block   conv3x3 - norm - relu - conv3x3 - norm - (+ skip) - relu
//   policy  conv1x1(F -> 32) - norm                      -> 81 x 32 = 2592 logits
//   value   conv1x1(F -> 1) - norm - relu - dense(81 -> H) - relu - dense(H -> 1) - tanh
//
// "norm" is a per-sample, per-channel normalization over the 81 squares with a
// learned gain and bias, so there is no batch statistic and no train/eval
// difference. Policy channel c at square q is action q * 32 + c.
//
// Everything is templated on the scalar type: float for training and
// inference, double for gradient checks.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablutzero/encoding.hpp"
#include "tablutzero/rules.hpp"

namespace tablutzero {

inline constexpr int kPolicyChannels = kActionsPerSquare;
inline constexpr double kNormEpsilon = 1e-5;

struct NetConfig {
  int blocks = 8;
  int filters = 128;
  int input_planes = kNumPlanes;
  int policy_actions = kNumActions;
  int value_hidden = 128;

  // Throws ContractViolation on non-positive sizes or a foreign board layout.
  void validate() const;
  bool operator==(const NetConfig&) const = default;
};

struct TensorSpec {
  std::string name;
  std::vector<int> shape;
  bool decay = true;  // false for norm gains/biases and dense biases
};

// Canonical tensor order. Checkpoints store tensors in exactly this order.
std::vector<TensorSpec> parameter_layout(const NetConfig& cfg);
std::size_t parameter_count(const NetConfig& cfg);

template <typename T>
struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<T> data;
  bool decay = true;

  bool operator==(const Tensor&) const = default;
};

template <typename T>
class Params {
 public:
  Params() = default;
  // All tensors zero.
  explicit Params(const NetConfig& cfg);

  const NetConfig& config() const { return cfg_; }
  std::vector<Tensor<T>>& tensors() { return tensors_; }
  const std::vector<Tensor<T>>& tensors() const { return tensors_; }
  Tensor<T>& get(std::string_view name);
  const Tensor<T>& get(std::string_view name) const;
  std::size_t parameter_count() const;

  template <typename U>
  Params<U> cast() const {
    Params<U> out(cfg_);
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
      auto& dst = out.tensors()[i].data;
      const auto& src = tensors_[i].data;
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] = static_cast<U>(src[j]);
    }
    return out;
  }

  bool operator==(const Params&) const = default;

 private:
  NetConfig cfg_;
  std::vector<Tensor<T>> tensors_;
};

// He-normal conv/dense weights, unit gains, zero biases. Deterministic in seed.
template <typename T>
Params<T> init_params(const NetConfig& cfg, std::uint64_t seed);

template <typename T>
struct NetOutput {
  std::vector<T> logits_attacker;
  T value_attacker{};
  std::vector<T> logits_defender;
  T value_defender{};
};

template <typename T>
struct HeadOutput {
  std::span<const T> logits;
  T value{};
};

template <typename T>
HeadOutput<T> select_head(const NetOutput<T>& o, Side side) {
  if (side == Side::kAttacker) return {o.logits_attacker, o.value_attacker};
  return {o.logits_defender, o.value_defender};
}

// Outputs for a batch. Index [side] with static_cast<int>(Side).
template <typename T>
struct BatchOutput {
  int batch = 0;
  std::array<std::vector<T>, 2> logits;  // batch x 2592
  std::array<std::vector<T>, 2> values;  // batch

  NetOutput<T> row(int b) const;
  HeadOutput<T> head(int b, Side side) const;
};

// inputs: batch x kPlaneStackSize in PlaneStack layout.
template <typename T>
BatchOutput<T> forward(const Params<T>& p, std::span<const T> inputs, int batch);

template <typename T>
std::vector<NetOutput<T>> forward(const Params<T>& p, std::span<const PlaneStack> inputs);

template <typename T>
struct TrainBatch {
  int batch = 0;
  std::vector<T> inputs;              // batch x kPlaneStackSize
  std::vector<T> policy_targets;      // batch x 2592
  std::vector<T> value_targets;       // batch
  std::vector<Side> side_to_move;     // batch
  std::vector<std::uint8_t> legal_masks;  // batch x 2592

  // Shapes, target normalization and target support. Throws ContractViolation.
  void validate() const;
};

struct LossTerms {
  double total = 0.0;
  double policy_ce = 0.0;
  double value_mse = 0.0;
  double entropy = 0.0;  // mean entropy of the masked policy, reported only
};

template <typename T>
LossTerms loss(const Params<T>& p, const TrainBatch<T>& b);

template <typename T>
struct LossAndGradients {
  LossTerms terms;
  Params<T> grads;
};

// Exact gradient of LossTerms::total.
template <typename T>
LossAndGradients<T> loss_and_gradients(const Params<T>& p, const TrainBatch<T>& b);

template <typename T>
Params<T> gradients(const Params<T>& p, const TrainBatch<T>& b) {
  return loss_and_gradients(p, b).grads;
}

// Softmax over the set bits of `mask`, zero elsewhere.
// One entry per ReLU unit (1 when active). Finite-difference gradient checks
// use it to discard coordinates whose perturbation crosses a kink.
template <typename T>
std::vector<std::uint8_t> activation_pattern(const Params<T>& p, std::span<const T> inputs, int batch);

template <typename T>
std::vector<T> masked_softmax(std::span<const T> logits, std::span<const std::uint8_t> mask);

}  // namespace tablutzero
