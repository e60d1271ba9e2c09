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

#include "tablutzero/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "tablutzero/errors.hpp"

namespace tablutzero {

double lr_at(const OptimizerConfig& cfg, std::int64_t step) {
  if (step < 0) throw ContractViolation("negative optimizer step");
  if (step < cfg.warmup_steps) {
    return cfg.peak_lr * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
  }
  if (step >= cfg.total_steps) return cfg.min_lr;
  const double progress = static_cast<double>(step - cfg.warmup_steps) /
                          static_cast<double>(cfg.total_steps - cfg.warmup_steps);
  return cfg.min_lr + (cfg.peak_lr - cfg.min_lr) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

template <typename T>
void adamw_update(Params<T>& p, const Params<T>& grads, OptState<T>& o) {
  auto& pt = p.tensors();
  const auto& gt = grads.tensors();
  auto& mt = o.first_moment.tensors();
  auto& vt = o.second_moment.tensors();
  if (gt.size() != pt.size() || mt.size() != pt.size() || vt.size() != pt.size())
    throw ContractViolation("optimizer tensors are not congruent with the parameters");
  for (std::size_t i = 0; i < pt.size(); ++i) {
    if (gt[i].data.size() != pt[i].data.size() || mt[i].data.size() != pt[i].data.size() ||
        vt[i].data.size() != pt[i].data.size())
      throw ContractViolation("tensor " + pt[i].name + " is not congruent");
    for (T g : gt[i].data) {
      if (!std::isfinite(static_cast<double>(g)))
        throw TrainingDivergence("non-finite gradient in " + pt[i].name + " at step " +
                                 std::to_string(o.step));
    }
  }

  const OptimizerConfig& h = o.hyper;
  const double lr = lr_at(h, o.step);
  const double t = static_cast<double>(o.step + 1);
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < pt.size(); ++i) {
    auto& w = pt[i].data;
    const auto& g = gt[i].data;
    auto& m = mt[i].data;
    auto& v = vt[i].data;
    const double decay = pt[i].decay ? h.weight_decay : 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = static_cast<double>(g[j]);
      const double mj = h.beta1 * static_cast<double>(m[j]) + (1.0 - h.beta1) * gj;
      const double vj = h.beta2 * static_cast<double>(v[j]) + (1.0 - h.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double m_hat = mj / bc1;
      const double v_hat = vj / bc2;
      const double wj = static_cast<double>(w[j]);
      w[j] = static_cast<T>(wj - lr * (m_hat / (std::sqrt(v_hat) + h.epsilon)) - lr * decay * wj);
    }
  }
  ++o.step;
}

template void adamw_update<float>(Params<float>&, const Params<float>&, OptState<float>&);
template void adamw_update<double>(Params<double>&, const Params<double>&, OptState<double>&);

}  // namespace tablutzero
