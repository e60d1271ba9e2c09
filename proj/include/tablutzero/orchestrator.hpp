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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tablutzero/metrics.hpp"
#include "tablutzero/rating.hpp"
#include "tablutzero/rules.hpp"
#include "tablutzero/run_config.hpp"

namespace tablutzero {

// Files of one training run.
struct RunPaths {
  explicit RunPaths(std::filesystem::path root);

  std::filesystem::path dir;
  std::filesystem::path checkpoints;  // ckpt_000012.tzc
  std::filesystem::path metrics;      // metrics.csv
  std::filesystem::path matches;      // matches.jsonl
  std::filesystem::path games;        // games.jsonl
  std::filesystem::path config;       // config.json

  std::filesystem::path checkpoint(int iteration) const;
  // Iterations with a checkpoint on disk, ascending.
  std::vector<int> checkpoint_iterations() const;
};

struct TrainOptions {
  // Stop once this iteration is written, as if the process were killed.
  std::optional<int> stop_after;
  bool log_games = true;
};

struct TrainSummary {
  int first_iteration = 0;  // first iteration run by this call
  int last_iteration = 0;
  bool resumed = false;
  std::vector<MetricsRow> rows;  // rows written by this call
};

// Iteration 0 is the randomly initialized network, saved as the rating
// anchor. Each later iteration runs self-play, the optimizer steps, the
// scheduled evaluations, then writes its checkpoint and metrics row. An
// existing run directory is resumed from its latest checkpoint; the replay
// buffer is refilled by self-play before optimizer steps resume.
TrainSummary cmd_train(const RunConfig& cfg, const TrainOptions& opts = {});

struct EvalOptions {
  std::filesystem::path candidate;
  // Checkpoint paths, or "random" for the uniform random agent.
  std::vector<std::string> opponents;
  int games_per_opponent = 8;
  int simulations = 32;
  std::uint64_t seed = 0;
};

// Role-balanced games of the candidate against each opponent, written to
// `out` as match JSONL. Throws CheckpointError when two networks do not share
// a configuration.
std::vector<MatchRecord> cmd_eval(const EvalOptions& opts, std::ostream& out);

// Fits ratings to the matches in `files` with "iter0" as anchor, prints the
// table to `out` and, if given, writes it to `csv`. Throws ConfigError when
// there are no matches.
RatingModel cmd_rate(const std::vector<std::filesystem::path>& files, std::ostream& out,
                     const std::optional<std::filesystem::path>& csv = std::nullopt,
                     const std::string& anchor = "iter0");

// Text game against a checkpoint. Commands: a move such as e3-e5, "moves",
// "dump" (root statistics of the agent's last search) and "quit".
int cmd_play(const std::filesystem::path& checkpoint, Side human, int simulations, std::uint64_t seed,
             std::istream& in, std::ostream& out);

void cmd_export_metrics(const std::filesystem::path& run_dir, std::ostream& out);

}  // namespace tablutzero
