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
#include <filesystem>
#include <limits>

#include "tablutzero/checkpoint.hpp"
#include "tablutzero/errors.hpp"
#include "tablutzero/optimizer.hpp"

namespace tz = tablutzero;

namespace {

tz::NetConfig tiny() {
  tz::NetConfig c;
  c.blocks = 1;
  c.filters = 4;
  c.value_hidden = 8;
  return c;
}

}  // namespace

TEST(Schedule, WarmupAndCosine) {
  const tz::OptimizerConfig cfg;
  EXPECT_DOUBLE_EQ(tz::lr_at(cfg, 0), 0.0);
  EXPECT_DOUBLE_EQ(tz::lr_at(cfg, 250), 0.001);
  EXPECT_DOUBLE_EQ(tz::lr_at(cfg, 500), 0.002);
  EXPECT_DOUBLE_EQ(tz::lr_at(cfg, cfg.total_steps), 0.00001);
  EXPECT_DOUBLE_EQ(tz::lr_at(cfg, cfg.total_steps + 1000), 0.00001);
  const std::int64_t mid = (cfg.warmup_steps + cfg.total_steps) / 2;
  EXPECT_NEAR(tz::lr_at(cfg, mid), 0.5 * (0.002 + 0.00001), 1e-9);
  for (std::int64_t s = cfg.warmup_steps; s < cfg.total_steps; s += 997) {
    EXPECT_GE(tz::lr_at(cfg, s), tz::lr_at(cfg, s + 997));
  }
  EXPECT_THROW(tz::lr_at(cfg, -1), tz::ContractViolation);
}

TEST(AdamW, FirstStepClosedForm) {
  tz::OptimizerConfig hyper;
  hyper.warmup_steps = 0;
  hyper.weight_decay = 0.0;
  tz::Params<double> p(tiny());
  p.get("value_attacker.fc2.bias").data[0] = 0.3;
  tz::Params<double> g(tiny());
  g.get("value_attacker.fc2.bias").data[0] = 1.0;
  auto opt = tz::OptState<double>::init(p, hyper);
  tz::adamw_update(p, g, opt);
  EXPECT_NEAR(p.get("value_attacker.fc2.bias").data[0], 0.3 - 0.002 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(opt.step, 1);
  EXPECT_EQ(p.get("stem.conv.weight").data, std::vector<double>(9 * 43 * 4, 0.0));
}

TEST(AdamW, ZeroGradientWithoutDecayKeepsParameters) {
  tz::OptimizerConfig hyper;
  hyper.weight_decay = 0.0;
  auto p = tz::init_params<float>(tiny(), 1);
  const auto before = p;
  auto opt = tz::OptState<float>::init(p, hyper);
  for (int i = 0; i < 600; ++i) tz::adamw_update(p, tz::Params<float>(tiny()), opt);
  EXPECT_EQ(p, before);
}

TEST(AdamW, DecoupledDecaySkipsNormParameters) {
  tz::OptimizerConfig hyper;
  hyper.warmup_steps = 0;
  hyper.weight_decay = 0.1;
  auto p = tz::init_params<double>(tiny(), 2);
  const auto before = p;
  auto opt = tz::OptState<double>::init(p, hyper);
  tz::adamw_update(p, tz::Params<double>(tiny()), opt);
  const double lr = 0.002;
  for (std::size_t i = 0; i < p.tensors().size(); ++i) {
    const auto& t = p.tensors()[i];
    for (std::size_t j = 0; j < t.data.size(); ++j) {
      const double w0 = before.tensors()[i].data[j];
      EXPECT_NEAR(t.data[j], t.decay ? w0 * (1.0 - lr * 0.1) : w0, 1e-15) << t.name;
    }
  }
}

TEST(AdamW, NonFiniteGradientThrows) {
  auto p = tz::init_params<float>(tiny(), 3);
  auto opt = tz::OptState<float>::init(p, {});
  tz::Params<float> g(tiny());
  g.get("block0.conv1.weight").data[3] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(tz::adamw_update(p, g, opt), tz::TrainingDivergence);
  EXPECT_EQ(opt.step, 0);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  tz::Checkpoint c;
  c.iteration = 4;
  c.rng_seeds = {{"selfplay", 11}, {"train", 12}};
  c.params = tz::init_params<float>(tiny(), 5);
  c.optimizer = tz::OptState<float>::init(c.params, {});
  tz::Params<float> g = tz::init_params<float>(tiny(), 6);
  tz::adamw_update(c.params, g, *c.optimizer);
  tz::adamw_update(c.params, g, *c.optimizer);
  const std::string bytes = tz::serialize_checkpoint(c);
  const auto back = tz::deserialize_checkpoint(bytes);
  EXPECT_EQ(back.iteration, 4);
  EXPECT_EQ(back.rng_seeds, c.rng_seeds);
  EXPECT_EQ(back.params, c.params);
  ASSERT_TRUE(back.optimizer.has_value());
  EXPECT_EQ(back.optimizer->step, 2);
  EXPECT_EQ(back.optimizer->first_moment, c.optimizer->first_moment);
  EXPECT_EQ(back.optimizer->second_moment, c.optimizer->second_moment);
  EXPECT_EQ(tz::serialize_checkpoint(back), bytes);

  const auto path = std::filesystem::temp_directory_path() / "tablutzero_ckpt_test.bin";
  tz::save_checkpoint(path, back);
  const auto loaded = tz::load_checkpoint(path);
  EXPECT_EQ(tz::serialize_checkpoint(loaded), bytes);
  std::filesystem::remove(path);
}

TEST(Checkpoint, WithoutOptimizerState) {
  tz::Checkpoint c;
  c.params = tz::init_params<float>(tiny(), 5);
  const auto back = tz::deserialize_checkpoint(tz::serialize_checkpoint(c));
  EXPECT_FALSE(back.optimizer.has_value());
  EXPECT_EQ(back.params, c.params);
}

TEST(Checkpoint, CorruptInputIsRejected) {
  tz::Checkpoint c;
  c.params = tz::init_params<float>(tiny(), 5);
  std::string bytes = tz::serialize_checkpoint(c);
  EXPECT_THROW(tz::deserialize_checkpoint(bytes.substr(0, bytes.size() - 4)), tz::CheckpointError);
  EXPECT_THROW(tz::deserialize_checkpoint("xx"), tz::CheckpointError);
  bytes[6] = '#';
  EXPECT_THROW(tz::deserialize_checkpoint(bytes), tz::CheckpointError);
  EXPECT_THROW(tz::load_checkpoint("/nonexistent/dir/ckpt.bin"), tz::CheckpointError);
}
