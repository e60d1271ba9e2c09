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
#include <filesystem>
#include <string>

#include "json.hpp"
#include "tablutzero/network.hpp"
#include "tablutzero/optimizer.hpp"
#include "tablutzero/rating.hpp"
#include "tablutzero/selfplay.hpp"

namespace tablutzero {

inline constexpr int kRunConfigVersion = 1;

struct RunConfig {
  int iterations = 100;
  NetConfig net;
  SelfPlayConfig selfplay;
  int batch_size = 512;
  std::int64_t total_steps = 102400;
  // 0 means total_steps / iterations.
  int train_steps_per_iteration = 0;
  OptimizerConfig optimizer;
  EvalSchedule evaluation;
  int eval_simulations = 128;

  bool augmentation = true;
  int buffer_iterations = 16;
  bool past_self_play = true;

  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";

  int steps_per_iteration() const;
  std::size_t buffer_capacity() const;
  double past_opponent_fraction() const { return past_self_play ? selfplay.past_opponent_fraction : 0.0; }

  // Throws ConfigError.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

// "baseline", "aug_buffer" or "full". Only the three toggles differ.
RunConfig apply_preset(RunConfig cfg, const std::string& preset);

nlohmann::ordered_json to_json(const RunConfig& cfg);
// Unknown keys, wrong types and a foreign schema version raise ConfigError.
// Missing keys keep their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace tablutzero
