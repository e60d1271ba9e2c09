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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "net_fixtures.hpp"
#include "oracles/naive_net.hpp"
#include "tablutzero/errors.hpp"
#include "tablutzero/network.hpp"
#include "tablutzero/optimizer.hpp"

namespace tz = tablutzero;
using tz::NetConfig;
using tz::Params;

namespace {

NetConfig tiny(int blocks = 2, int filters = 8) {
  NetConfig c;
  c.blocks = blocks;
  c.filters = filters;
  c.value_hidden = 16;
  return c;
}

std::vector<double> random_input(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(tz::kPlaneStackSize);
  for (auto& v : x) v = u(rng) < 0.3 ? 1.0 : 0.0;
  return x;
}

}  // namespace

TEST(Params, CountMatchesShapeTable) {
  const NetConfig cfg;  // 8 blocks, 128 filters, hidden 128
  const std::size_t F = 128, P = 43, H = 128;
  const std::size_t stem = 9 * P * F + 2 * F;
  const std::size_t block = 2 * (9 * F * F + 2 * F);
  const std::size_t head = (F * 32 + 2 * 32) + (F + 2) + (81 * H + H) + (H + 1);
  EXPECT_EQ(tz::parameter_count(cfg), stem + 8 * block + 2 * head);
  EXPECT_EQ(Params<float>(cfg).parameter_count(), tz::parameter_count(cfg));
}

TEST(Params, InitIsDeterministic) {
  const auto a = tz::init_params<float>(tiny(), 7);
  const auto b = tz::init_params<float>(tiny(), 7);
  const auto c = tz::init_params<float>(tiny(), 8);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  EXPECT_EQ(a.get("stem.norm.gain").data, std::vector<float>(8, 1.0f));
  EXPECT_EQ(a.get("block0.norm2.bias").data, std::vector<float>(8, 0.0f));
}

TEST(Params, ConfigValidation) {
  NetConfig c = tiny();
  c.blocks = 0;
  EXPECT_THROW(c.validate(), tz::ContractViolation);
  c = tiny();
  c.input_planes = 42;
  EXPECT_THROW(c.validate(), tz::ContractViolation);
}

TEST(Forward, MatchesNaiveReference) {
  const auto p = tz::init_params<double>(tiny(2, 6), 3);
  const auto x0 = random_input(1);
  const auto x1 = random_input(2);
  std::vector<double> both(x0);
  both.insert(both.end(), x1.begin(), x1.end());
  const auto out = tz::forward<double>(p, both, 2);
  for (int b = 0; b < 2; ++b) {
    const auto ref = tz::oracle::naive_forward(p, b == 0 ? x0 : x1);
    for (int s = 0; s < 2; ++s) {
      const auto side = static_cast<tz::Side>(s);
      const auto head = out.head(b, side);
      EXPECT_NEAR(head.value, ref.value[s], 1e-5 * std::max(1.0, std::abs(ref.value[s])));
      for (int a = 0; a < tz::kNumActions; ++a) {
        ASSERT_NEAR(head.logits[a], ref.logits[s][a], 1e-5 * std::max(1.0, std::abs(ref.logits[s][a])));
      }
    }
  }
}

TEST(Forward, FloatAgreesWithDouble) {
  const auto pd = tz::init_params<double>(tiny(), 4);
  const auto pf = pd.cast<float>();
  const auto xd = random_input(9);
  const std::vector<float> xf(xd.begin(), xd.end());
  const auto od = tz::forward<double>(pd, xd, 1);
  const auto of = tz::forward<float>(pf, xf, 1);
  for (int s = 0; s < 2; ++s) {
    EXPECT_NEAR(of.values[s][0], od.values[s][0], 1e-4);
    for (int a = 0; a < tz::kNumActions; a += 7) EXPECT_NEAR(of.logits[s][a], od.logits[s][a], 1e-3);
  }
}

TEST(Forward, ZeroFinalLayerGivesZeroValue) {
  auto p = tz::init_params<float>(tiny(), 5);
  for (const char* side : {"attacker", "defender"}) {
    auto& w2 = p.get(std::string("value_") + side + ".fc2.weight").data;
    std::fill(w2.begin(), w2.end(), 0.0f);
  }
  const std::vector<float> zeros(tz::kPlaneStackSize, 0.0f);
  const auto out = tz::forward<float>(p, zeros, 1);
  EXPECT_EQ(out.values[0][0], 0.0f);
  EXPECT_EQ(out.values[1][0], 0.0f);
}

TEST(Forward, IdenticalInputsGiveIdenticalRowsAndBoundedValues) {
  const auto p = tz::init_params<float>(tiny(), 6);
  const auto x = random_input(3);
  std::vector<float> two(x.begin(), x.end());
  two.insert(two.end(), x.begin(), x.end());
  const auto out = tz::forward<float>(p, two, 2);
  const auto r0 = out.row(0);
  const auto r1 = out.row(1);
  // GEMM tiling may round rows differently, so equality is up to float noise.
  for (int a = 0; a < tz::kNumActions; ++a) {
    ASSERT_NEAR(r0.logits_attacker[a], r1.logits_attacker[a], 1e-5f);
    ASSERT_NEAR(r0.logits_defender[a], r1.logits_defender[a], 1e-5f);
  }
  EXPECT_NEAR(r0.value_attacker, r1.value_attacker, 1e-6f);
  EXPECT_GT(r0.value_attacker, -1.0f);
  EXPECT_LT(r0.value_attacker, 1.0f);
  EXPECT_THROW(tz::forward<float>(p, std::span<const float>(two.data(), 100), 1), tz::ContractViolation);
}

TEST(Forward, SelectedHeadIgnoresTheOtherHead) {
  auto p = tz::init_params<float>(tiny(), 8);
  const auto x = random_input(4);
  const std::vector<float> xf(x.begin(), x.end());
  const auto before = tz::forward<float>(p, xf, 1).row(0);
  for (auto& t : p.tensors()) {
    if (t.name.rfind("policy_defender", 0) == 0 || t.name.rfind("value_defender", 0) == 0) {
      for (auto& v : t.data) v += 0.5f;
    }
  }
  const auto after = tz::forward<float>(p, xf, 1).row(0);
  const auto h0 = tz::select_head(before, tz::Side::kAttacker);
  const auto h1 = tz::select_head(after, tz::Side::kAttacker);
  EXPECT_EQ(h0.value, h1.value);
  EXPECT_TRUE(std::equal(h0.logits.begin(), h0.logits.end(), h1.logits.begin()));
  EXPECT_NE(tz::select_head(before, tz::Side::kDefender).value,
            tz::select_head(after, tz::Side::kDefender).value);
}

TEST(Loss, UniformTargetAndLogitsGiveLogL) {
  auto p = tz::init_params<double>(tiny(), 1);
  for (const char* side : {"attacker", "defender"}) {
    auto& g = p.get(std::string("policy_") + side + ".norm.gain").data;
    std::fill(g.begin(), g.end(), 0.0);
  }
  auto b = tz::testing::random_batch<double>(3, 4);
  double expected = 0.0;
  for (int i = 0; i < b.batch; ++i) {
    int legal = 0;
    for (int a = 0; a < tz::kNumActions; ++a) legal += b.legal_masks[i * tz::kNumActions + a];
    for (int a = 0; a < tz::kNumActions; ++a) {
      b.policy_targets[i * tz::kNumActions + a] = b.legal_masks[i * tz::kNumActions + a] ? 1.0 / legal : 0.0;
    }
    expected += std::log(static_cast<double>(legal));
  }
  const auto terms = tz::loss(p, b);
  EXPECT_NEAR(terms.policy_ce, expected / b.batch, 1e-9);
  EXPECT_NEAR(terms.entropy, expected / b.batch, 1e-9);
}

TEST(Loss, PeakedLogitsOnTargetGiveNearZeroCrossEntropy) {
  auto p = tz::init_params<double>(tiny(), 1);
  auto b = tz::testing::random_batch<double>(1, 4, 1, true);
  int target = 0;
  for (int a = 0; a < tz::kNumActions; ++a) {
    if (b.policy_targets[a] > 0.5) target = a;
  }
  // Logits = bias of the policy norm: 100 on the target channel, which is
  // aligned with its square via a constant-zero gain.
  auto& g = p.get("policy_attacker.norm.gain").data;
  std::fill(g.begin(), g.end(), 0.0);
  auto& bias = p.get("policy_attacker.norm.bias").data;
  std::fill(bias.begin(), bias.end(), 0.0);
  bias[target % tz::kPolicyChannels] = 100.0;
  // Other squares sharing that channel must be illegal for the limit to hold.
  for (int a = 0; a < tz::kNumActions; ++a) {
    if (a != target && a % tz::kPolicyChannels == target % tz::kPolicyChannels) b.legal_masks[a] = 0;
  }
  EXPECT_LT(tz::loss(p, b).policy_ce, 1e-6);
}

TEST(Loss, ValueErrorIsZeroWhenPredictionMatches) {
  auto p = tz::init_params<double>(tiny(), 2);
  auto b = tz::testing::random_batch<double>(4, 5);
  const auto out = tz::forward<double>(p, b.inputs, b.batch);
  // Targets in {-1,0,1} are not required by the loss itself.
  for (int i = 0; i < b.batch; ++i) b.value_targets[i] = out.head(i, b.side_to_move[i]).value;
  EXPECT_NEAR(tz::loss(p, b).value_mse, 0.0, 1e-24);
  const auto g = tz::gradients(p, b);
  for (const auto& t : g.tensors()) {
    if (t.name.find(".fc") != std::string::npos) {
      for (double v : t.data) EXPECT_NEAR(v, 0.0, 1e-12) << t.name;
    }
  }
}

TEST(Loss, TargetMassOnIllegalActionIsRejected) {
  const auto p = tz::init_params<float>(tiny(), 2);
  auto b = tz::testing::random_batch<float>(2, 5);
  for (int a = 0; a < tz::kNumActions; ++a) {
    if (!b.legal_masks[a]) {
      b.policy_targets[a] = 0.1f;
      break;
    }
  }
  EXPECT_THROW(tz::loss(p, b), tz::ContractViolation);
}

TEST(Gradients, MatchCentralDifferences) {
  const auto rep = tz::testing::gradient_check(tiny(2, 8), 4, 200, 11);
  EXPECT_EQ(rep.coordinates, 200);
  EXPECT_LT(rep.max_rel_error, 1e-4) << rep.worst;
}

TEST(Gradients, UnselectedHeadGetsNoGradient) {
  const auto p = tz::init_params<double>(tiny(), 3);
  const auto b = tz::testing::random_batch<double>(3, 6, 1);
  const auto g = tz::gradients(p, b);
  double trunk = 0.0;
  for (const auto& t : g.tensors()) {
    const bool defender = t.name.find("defender") != std::string::npos;
    for (double v : t.data) {
      if (defender) {
        ASSERT_EQ(v, 0.0) << t.name;
      } else if (t.name.rfind("block", 0) == 0) {
        trunk += std::abs(v);
      }
    }
  }
  EXPECT_GT(trunk, 0.0);
}

TEST(MaskedSoftmax, SupportAndNormalization) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> logits(tz::kNumActions);
    std::vector<std::uint8_t> mask(tz::kNumActions);
    for (int a = 0; a < tz::kNumActions; ++a) {
      logits[a] = n(rng);
      mask[a] = rng() % 5 == 0;
    }
    mask[trial] = 1;
    const auto p = tz::masked_softmax<double>(logits, mask);
    double sum = 0.0;
    for (int a = 0; a < tz::kNumActions; ++a) {
      if (!mask[a]) {
        EXPECT_EQ(p[a], 0.0);
      }
      sum += p[a];
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
}

TEST(Training, TinyNetFitsSmallBatch) {
  auto p = tz::init_params<float>(tiny(1, 16), 12);
  const auto b = tz::testing::random_batch<float>(16, 13, 0, true);
  tz::OptimizerConfig hyper;
  hyper.warmup_steps = 20;
  hyper.total_steps = 400;
  hyper.peak_lr = 0.01;
  auto opt = tz::OptState<float>::init(p, hyper);
  const double start = tz::loss(p, b).total;
  for (int i = 0; i < 400; ++i) {
    auto lg = tz::loss_and_gradients(p, b);
    tz::adamw_update(p, lg.grads, opt);
  }
  const auto end = tz::loss(p, b);
  EXPECT_LT(end.total, 0.2 * start);
  EXPECT_LT(end.policy_ce, 0.5);
  EXPECT_LT(end.value_mse, 0.1);
}
