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


#include "tablutzero/run_config.hpp"

#include <fstream>
#include <set>

#include "tablutzero/errors.hpp"

namespace tablutzero {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads the keys of one JSON object into fields, rejecting unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + " must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError("unknown key " + where_ + "." + key);
  }

  template <typename T>
  void get(const char* key, T& field) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_[key];
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else {
        if (!v.is_string()) throw ConfigError("");
      }
      field = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("bad value for " + where_ + "." + key + ": " + v.dump());
    }
  }

  const json* section(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_[key] : nullptr;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

int RunConfig::steps_per_iteration() const {
  if (train_steps_per_iteration > 0) return train_steps_per_iteration;
  return static_cast<int>(total_steps / std::max(1, iterations));
}

std::size_t RunConfig::buffer_capacity() const {
  return static_cast<std::size_t>(buffer_iterations) * selfplay.parallel_games *
         selfplay.steps_per_iteration;
}

void RunConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  try {
    net.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("net: ") + e.what());
  }
  selfplay.validate();
  evaluation.validate();
  if (eval_simulations < 2) throw ConfigError("eval_simulations must be >= 2");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (total_steps < 0 || train_steps_per_iteration < 0)
    throw ConfigError("training step counts must be >= 0");
  if (buffer_iterations < 1) throw ConfigError("buffer_iterations must be >= 1");
  if (static_cast<std::size_t>(batch_size) > buffer_capacity())
    throw ConfigError("batch_size " + std::to_string(batch_size) + " exceeds the replay buffer capacity " +
                      std::to_string(buffer_capacity()));
  if (!(optimizer.peak_lr > 0.0) || optimizer.min_lr < 0.0 || optimizer.min_lr > optimizer.peak_lr)
    throw ConfigError("learning rates must satisfy 0 <= min_lr <= peak_lr, peak_lr > 0");
  if (optimizer.warmup_steps < 0 || optimizer.weight_decay < 0.0)
    throw ConfigError("warmup_steps and weight_decay must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig apply_preset(RunConfig cfg, const std::string& preset) {
  if (preset == "baseline") {
    cfg.augmentation = false;
    cfg.buffer_iterations = 8;
    cfg.past_self_play = false;
  } else if (preset == "aug_buffer") {
    cfg.augmentation = true;
    cfg.buffer_iterations = 16;
    cfg.past_self_play = false;
  } else if (preset == "full") {
    cfg.augmentation = true;
    cfg.buffer_iterations = 16;
    cfg.past_self_play = true;
  } else {
    throw ConfigError("unknown preset " + preset + " (expected baseline, aug_buffer or full)");
  }
  return cfg;
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = kRunConfigVersion;
  j["iterations"] = c.iterations;
  j["net"] = {{"blocks", c.net.blocks}, {"filters", c.net.filters}, {"value_hidden", c.net.value_hidden}};
  j["selfplay"] = {{"parallel_games", c.selfplay.parallel_games},
                   {"steps_per_iteration", c.selfplay.steps_per_iteration},
                   {"simulations", c.selfplay.simulations},
                   {"max_considered_actions", c.selfplay.max_considered_actions},
                   {"past_opponent_fraction", c.selfplay.past_opponent_fraction},
                   {"threads", c.selfplay.threads}};
  j["training"] = {{"batch_size", c.batch_size},
                   {"total_steps", c.total_steps},
                   {"train_steps_per_iteration", c.train_steps_per_iteration},
                   {"peak_lr", c.optimizer.peak_lr},
                   {"min_lr", c.optimizer.min_lr},
                   {"warmup_steps", c.optimizer.warmup_steps},
                   {"weight_decay", c.optimizer.weight_decay},
                   {"beta1", c.optimizer.beta1},
                   {"beta2", c.optimizer.beta2},
                   {"epsilon", c.optimizer.epsilon}};
  j["evaluation"] = {{"start_iteration", c.evaluation.start_iteration},
                     {"period", c.evaluation.period},
                     {"opponents_per_eval", c.evaluation.opponents_per_eval},
                     {"pool_cap", c.evaluation.pool_cap},
                     {"games_per_pairing", c.evaluation.games_per_pairing},
                     {"simulations", c.eval_simulations}};
  j["augmentation"] = c.augmentation;
  j["buffer_iterations"] = c.buffer_iterations;
  j["past_self_play"] = c.past_self_play;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader top(j, "config");
  int version = kRunConfigVersion;
  top.get("schema_version", version);
  if (version != kRunConfigVersion)
    throw ConfigError("config schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kRunConfigVersion) + ")");
  top.get("iterations", c.iterations);
  if (const json* s = top.section("net")) {
    Reader r(*s, "net");
    r.get("blocks", c.net.blocks);
    r.get("filters", c.net.filters);
    r.get("value_hidden", c.net.value_hidden);
  }
  if (const json* s = top.section("selfplay")) {
    Reader r(*s, "selfplay");
    r.get("parallel_games", c.selfplay.parallel_games);
    r.get("steps_per_iteration", c.selfplay.steps_per_iteration);
    r.get("simulations", c.selfplay.simulations);
    r.get("max_considered_actions", c.selfplay.max_considered_actions);
    r.get("past_opponent_fraction", c.selfplay.past_opponent_fraction);
    r.get("threads", c.selfplay.threads);
  }
  if (const json* s = top.section("training")) {
    Reader r(*s, "training");
    r.get("batch_size", c.batch_size);
    r.get("total_steps", c.total_steps);
    r.get("train_steps_per_iteration", c.train_steps_per_iteration);
    r.get("peak_lr", c.optimizer.peak_lr);
    r.get("min_lr", c.optimizer.min_lr);
    r.get("warmup_steps", c.optimizer.warmup_steps);
    r.get("weight_decay", c.optimizer.weight_decay);
    r.get("beta1", c.optimizer.beta1);
    r.get("beta2", c.optimizer.beta2);
    r.get("epsilon", c.optimizer.epsilon);
  }
  if (const json* s = top.section("evaluation")) {
    Reader r(*s, "evaluation");
    r.get("start_iteration", c.evaluation.start_iteration);
    r.get("period", c.evaluation.period);
    r.get("opponents_per_eval", c.evaluation.opponents_per_eval);
    r.get("pool_cap", c.evaluation.pool_cap);
    r.get("games_per_pairing", c.evaluation.games_per_pairing);
    r.get("simulations", c.eval_simulations);
  }
  top.get("augmentation", c.augmentation);
  top.get("buffer_iterations", c.buffer_iterations);
  top.get("past_self_play", c.past_self_play);
  top.get("seed", c.seed);
  top.get("output_dir", c.output_dir);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace tablutzero
