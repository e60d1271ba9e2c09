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
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tablutzero/game_record.hpp"
#include "tablutzero/replay_buffer.hpp"
#include "tablutzero/tablut_search.hpp"

namespace tablutzero {

struct SelfPlayConfig {
  int parallel_games = 1024;
  int steps_per_iteration = 256;
  int simulations = 128;
  int max_considered_actions = 16;
  double past_opponent_fraction = 0.25;
  int threads = 1;

  bool operator==(const SelfPlayConfig&) const = default;

  void validate() const;
};

// Past checkpoints available as opponents: the iteration-0 anchor plus up to
// `capacity` of the most recent evaluation checkpoints. Parameters are read
// from disk on first use unless supplied up front.
class OpponentPool {
 public:
  struct Entry {
    int iteration = 0;
    std::filesystem::path path;
    std::shared_ptr<const Params<float>> params;
  };

  explicit OpponentPool(int capacity = 10) : capacity_(capacity) {}

  void set_anchor(int iteration, std::filesystem::path path,
                  std::shared_ptr<const Params<float>> params = nullptr);
  void add(int iteration, std::filesystem::path path,
           std::shared_ptr<const Params<float>> params = nullptr);

  bool has_anchor() const { return anchor_.has_value(); }
  int capacity() const { return capacity_; }
  // Anchor first, then the recent checkpoints oldest first.
  std::vector<int> iterations() const;
  std::size_t size() const { return recent_.size() + (anchor_ ? 1 : 0); }

  // Entry `index` in iterations() order. Throws CheckpointError when the file
  // cannot be loaded.
  std::shared_ptr<const Params<float>> params(std::size_t index);
  const Entry& entry(std::size_t index) const;

 private:
  Entry& mutable_entry(std::size_t index);

  int capacity_;
  std::optional<Entry> anchor_;
  std::vector<Entry> recent_;
};

struct IterationStats {
  int iteration = 0;
  int plies = 0;
  int current_model_plies = 0;
  int games = 0;
  int attacker_wins = 0;
  int defender_wins = 0;
  int draws = 0;
  int versus_past_games = 0;
  double mean_pieces_remaining = 0.0;
  double mean_root_entropy = 0.0;
  std::size_t samples_added = 0;
  std::size_t buffer_size = 0;
  std::vector<GameRecord> records;
};

using Planner = std::function<std::vector<SearchResult>(std::span<const SearchRequest>)>;

// The self-play environments. They outlive an iteration: a game cut off by the
// step budget continues in the next call and reaches the buffer once it ends.
class SelfPlayRunner {
 public:
  // Environment i draws from a stream seeded by (seed, first_env + i), so a
  // runner can reproduce any subset of another runner's environments.
  SelfPlayRunner(SelfPlayConfig cfg, std::uint64_t seed, Planner planner = run_searches,
                 int first_env = 0);

  // Advances every environment by exactly cfg.steps_per_iteration plies.
  // Opponent checkpoints are drawn from `pool`; with an empty pool every game
  // is pure self-play.
  IterationStats run_iteration(const Params<float>& current, int iteration, OpponentPool& pool,
                               ReplayBuffer& buffer);

  const SelfPlayConfig& config() const { return cfg_; }
  std::size_t pending_plies() const;

 private:
  struct Env {
    std::mt19937_64 rng;
    GameState state;
    std::vector<Move> moves;
    std::vector<PlyRecord> trajectory;
    bool versus_past = false;
    Side current_side = Side::kAttacker;
    std::shared_ptr<const Params<float>> opponent;
    int past_assignments = 0;
  };

  void reset(Env& env, std::size_t index, OpponentPool& pool);
  std::vector<SearchResult> plan(std::span<const SearchRequest> requests) const;

  SelfPlayConfig cfg_;
  Planner planner_;
  int first_env_;
  std::vector<Env> envs_;
  bool started_ = false;
};

}  // namespace tablutzero
