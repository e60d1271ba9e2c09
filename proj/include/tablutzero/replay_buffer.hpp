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
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tablutzero/encoding.hpp"
#include "tablutzero/network.hpp"
#include "tablutzero/rules.hpp"

namespace tablutzero {

// One training position. The planes are kept as the history window they are
// encoded from, and the policy target sparsely over the legal actions.
struct Sample {
  HistoryWindow window;
  std::vector<std::uint16_t> legal;  // ascending action indices
  std::vector<float> policy;         // parallel to `legal`, sums to 1
  std::int8_t value_target = 0;      // final result for side_to_move
  Side side_to_move = Side::kAttacker;
  int iteration_born = 0;
  bool versus_past = false;

  PlaneStack planes() const { return encode_state(window); }
  std::vector<float> policy_vector() const;
  ActionMask legal_mask() const;
};

// Pending sample from a search: the result is attached once the game ends.
struct PlyRecord {
  HistoryWindow window;
  std::vector<std::uint16_t> legal;
  std::vector<float> policy;
  Side side_to_move = Side::kAttacker;
  int iteration = 0;
  bool versus_past = false;
};

PlyRecord make_ply_record(const GameState& s, std::span<const float> full_policy, int iteration,
                          bool versus_past);

std::vector<Sample> finalize_game(std::span<const PlyRecord> trajectory, const Outcome& outcome);

// FIFO ring of samples. add() and sample() lock, so one writer and several
// readers may share a buffer.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const;
  void add(std::span<const Sample> samples);
  void clear();

  // Oldest first.
  Sample at(std::size_t i) const;

  // Uniform with replacement, as positions from oldest to newest.
  std::vector<std::size_t> draw_indices(std::size_t count, std::mt19937_64& rng) const;

  // Draws `batch_size` samples and applies an independent random quarter
  // turn to each when `augment` is set (or the fixed turn `rotation`).
  // Throws NotReady when fewer samples than batch_size are stored.
  TrainBatch<float> sample(int batch_size, std::mt19937_64& rng, bool augment = true,
                           std::optional<int> rotation = std::nullopt) const;

 private:
  std::size_t capacity_;
  std::vector<Sample> ring_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  mutable std::mutex mutex_;
};

}  // namespace tablutzero
