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


#include "tablutzero/replay_buffer.hpp"

#include <algorithm>
#include <cmath>

#include "tablutzero/errors.hpp"

namespace tablutzero {

std::vector<float> Sample::policy_vector() const {
  std::vector<float> v(kNumActions, 0.0f);
  for (std::size_t i = 0; i < legal.size(); ++i) v[legal[i]] = policy[i];
  return v;
}

ActionMask Sample::legal_mask() const {
  ActionMask m;
  for (auto a : legal) m.set(a);
  return m;
}

PlyRecord make_ply_record(const GameState& s, std::span<const float> full_policy, int iteration,
                          bool versus_past) {
  if (full_policy.size() != static_cast<std::size_t>(kNumActions))
    throw ContractViolation("policy target must cover the whole action space");
  PlyRecord r;
  r.window = HistoryWindow::from_state(s);
  r.side_to_move = s.to_move();
  r.iteration = iteration;
  r.versus_past = versus_past;
  double total = 0.0;
  for (int a : legal_actions(s)) {
    r.legal.push_back(static_cast<std::uint16_t>(a));
    r.policy.push_back(full_policy[a]);
    total += full_policy[a];
  }
  if (!(total > 0.0)) throw ContractViolation("policy target has no mass on legal actions");
  for (float& p : r.policy) p = static_cast<float>(p / total);
  return r;
}

std::vector<Sample> finalize_game(std::span<const PlyRecord> trajectory, const Outcome& outcome) {
  std::vector<Sample> out;
  out.reserve(trajectory.size());
  for (const auto& ply : trajectory) {
    Sample s;
    s.window = ply.window;
    s.legal = ply.legal;
    s.policy = ply.policy;
    s.value_target = static_cast<std::int8_t>(outcome_value_for(outcome, ply.side_to_move));
    s.side_to_move = ply.side_to_move;
    s.iteration_born = ply.iteration;
    s.versus_past = ply.versus_past;
    out.push_back(std::move(s));
  }
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractViolation("replay buffer capacity must be positive");
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return ring_.size();
}

void ReplayBuffer::add(std::span<const Sample> samples) {
  std::lock_guard lock(mutex_);
  for (const auto& s : samples) {
    if (ring_.size() < capacity_) {
      ring_.push_back(s);
    } else {
      ring_[head_] = s;
      head_ = (head_ + 1) % capacity_;
    }
  }
}

void ReplayBuffer::clear() {
  std::lock_guard lock(mutex_);
  ring_.clear();
  head_ = 0;
}

Sample ReplayBuffer::at(std::size_t i) const {
  std::lock_guard lock(mutex_);
  if (i >= ring_.size()) throw ContractViolation("replay buffer index out of range");
  return ring_[(head_ + i) % ring_.size()];
}

std::vector<std::size_t> ReplayBuffer::draw_indices(std::size_t count, std::mt19937_64& rng) const {
  const std::size_t n = size();
  if (n == 0) throw NotReady("replay buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = pick(rng);
  return out;
}

TrainBatch<float> ReplayBuffer::sample(int batch_size, std::mt19937_64& rng, bool augment,
                                       std::optional<int> rotation) const {
  std::lock_guard lock(mutex_);
  if (batch_size <= 0) throw ContractViolation("batch size must be positive");
  if (ring_.size() < static_cast<std::size_t>(batch_size))
    throw NotReady("replay buffer holds " + std::to_string(ring_.size()) + " samples, batch needs " +
                   std::to_string(batch_size));
  TrainBatch<float> b;
  b.batch = batch_size;
  b.inputs.resize(static_cast<std::size_t>(batch_size) * kPlaneStackSize);
  b.policy_targets.assign(static_cast<std::size_t>(batch_size) * kNumActions, 0.0f);
  b.legal_masks.assign(static_cast<std::size_t>(batch_size) * kNumActions, 0);
  b.value_targets.resize(batch_size);
  b.side_to_move.resize(batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
  std::uniform_int_distribution<int> turn(0, 3);
  for (int i = 0; i < batch_size; ++i) {
    const Sample& s = ring_[(head_ + pick(rng)) % ring_.size()];
    int k = 0;
    if (rotation) {
      k = *rotation;
    } else if (augment) {
      k = turn(rng);
    }
    PlaneStack planes = s.planes();
    if (k != 0) planes = rotate_planes(planes, k);
    std::copy(planes.data.begin(), planes.data.end(),
              b.inputs.begin() + static_cast<std::ptrdiff_t>(i) * kPlaneStackSize);
    const std::size_t row = static_cast<std::size_t>(i) * kNumActions;
    for (std::size_t j = 0; j < s.legal.size(); ++j) {
      const int a = rotate_action(s.legal[j], k);
      b.policy_targets[row + a] = s.policy[j];
      b.legal_masks[row + a] = 1;
    }
    b.value_targets[i] = s.value_target;
    b.side_to_move[i] = s.side_to_move;
  }
  return b;
}

}  // namespace tablutzero
