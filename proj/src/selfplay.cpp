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


#include "tablutzero/selfplay.hpp"

#include <algorithm>
#include <thread>

#include "tablutzero/checkpoint.hpp"
#include "tablutzero/errors.hpp"

namespace tablutzero {

void SelfPlayConfig::validate() const {
  if (parallel_games < 1) throw ConfigError("parallel_games must be >= 1");
  if (steps_per_iteration < 1) throw ConfigError("steps_per_iteration must be >= 1");
  if (simulations < 2) throw ConfigError("simulations must be >= 2");
  if (max_considered_actions < 2) throw ConfigError("max_considered_actions must be >= 2");
  if (!(past_opponent_fraction >= 0.0 && past_opponent_fraction <= 1.0))
    throw ConfigError("past_opponent_fraction must lie in [0, 1]");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

void OpponentPool::set_anchor(int iteration, std::filesystem::path path,
                              std::shared_ptr<const Params<float>> params) {
  anchor_ = Entry{iteration, std::move(path), std::move(params)};
}

void OpponentPool::add(int iteration, std::filesystem::path path,
                       std::shared_ptr<const Params<float>> params) {
  recent_.push_back(Entry{iteration, std::move(path), std::move(params)});
  while (static_cast<int>(recent_.size()) > capacity_) recent_.erase(recent_.begin());
}

std::vector<int> OpponentPool::iterations() const {
  std::vector<int> out;
  if (anchor_) out.push_back(anchor_->iteration);
  for (const auto& e : recent_) out.push_back(e.iteration);
  return out;
}

const OpponentPool::Entry& OpponentPool::entry(std::size_t index) const {
  return const_cast<OpponentPool*>(this)->mutable_entry(index);
}

OpponentPool::Entry& OpponentPool::mutable_entry(std::size_t index) {
  if (index >= size()) throw ContractViolation("opponent pool index out of range");
  if (anchor_) {
    if (index == 0) return *anchor_;
    --index;
  }
  return recent_[index];
}

std::shared_ptr<const Params<float>> OpponentPool::params(std::size_t index) {
  Entry& e = mutable_entry(index);
  if (!e.params) {
    try {
      e.params = std::make_shared<const Params<float>>(load_checkpoint(e.path).params);
    } catch (const CheckpointError& err) {
      throw CheckpointError("opponent checkpoint for iteration " + std::to_string(e.iteration) + " (" +
                            e.path.string() + "): " + err.what());
    }
  }
  return e.params;
}

SelfPlayRunner::SelfPlayRunner(SelfPlayConfig cfg, std::uint64_t seed, Planner planner, int first_env)
    : cfg_(cfg), planner_(std::move(planner)), first_env_(first_env) {
  if (first_env < 0) throw ContractViolation("first_env must be >= 0");
  cfg_.validate();
  envs_.resize(cfg_.parallel_games);
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(first_env_ + static_cast<int>(i)), 0x5e1fu};
    envs_[i].rng.seed(seq);
  }
}

std::size_t SelfPlayRunner::pending_plies() const {
  std::size_t n = 0;
  for (const auto& e : envs_) n += e.trajectory.size();
  return n;
}

void SelfPlayRunner::reset(Env& env, std::size_t index, OpponentPool& pool) {
  env.state = GameState::initial();
  env.moves.clear();
  env.trajectory.clear();
  env.opponent.reset();
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  env.versus_past = coin(env.rng) < cfg_.past_opponent_fraction && pool.size() > 0;
  if (env.versus_past) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    env.opponent = pool.params(pick(env.rng));
    env.current_side = (first_env_ + static_cast<int>(index) + env.past_assignments) % 2 == 0 ? Side::kAttacker
                                                                               : Side::kDefender;
    ++env.past_assignments;
  }
}

std::vector<SearchResult> SelfPlayRunner::plan(std::span<const SearchRequest> requests) const {
  const std::size_t n = requests.size();
  const std::size_t shards = std::min<std::size_t>(static_cast<std::size_t>(cfg_.threads), n);
  if (shards <= 1) return planner_(requests);
  std::vector<std::vector<SearchResult>> parts(shards);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t lo = n * s / shards, hi = n * (s + 1) / shards;
    workers.emplace_back([&, s, lo, hi] {
      try {
        parts[s] = planner_(requests.subspan(lo, hi - lo));
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<SearchResult> out;
  out.reserve(n);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

IterationStats SelfPlayRunner::run_iteration(const Params<float>& current, int iteration,
                                             OpponentPool& pool, ReplayBuffer& buffer) {
  if (!started_) {
    for (std::size_t i = 0; i < envs_.size(); ++i) reset(envs_[i], i, pool);
    started_ = true;
  }
  IterationStats stats;
  stats.iteration = iteration;
  double pieces = 0.0, entropy = 0.0;
  std::vector<SearchRequest> requests(envs_.size());
  for (int step = 0; step < cfg_.steps_per_iteration; ++step) {
    for (std::size_t i = 0; i < envs_.size(); ++i) {
      Env& env = envs_[i];
      const bool mine = !env.versus_past || env.state.to_move() == env.current_side;
      requests[i].state = env.state;
      requests[i].params = mine ? &current : env.opponent.get();
      requests[i].config.simulations = cfg_.simulations;
      requests[i].config.max_considered_actions = cfg_.max_considered_actions;
      requests[i].config.rng_seed = env.rng();
    }
    const auto results = plan(requests);
    for (std::size_t i = 0; i < envs_.size(); ++i) {
      Env& env = envs_[i];
      const SearchResult& r = results[i];
      ++stats.plies;
      if (requests[i].params == &current) {
        env.trajectory.push_back(make_ply_record(env.state, r.policy, iteration, env.versus_past));
        ++stats.current_model_plies;
        entropy += r.root_entropy;
      }
      const Move m = action_to_move(r.chosen_action);
      env.state = apply_move(env.state, m);
      env.moves.push_back(m);
      if (!env.state.is_terminal()) continue;

      const Outcome& o = *env.state.outcome();
      const auto samples = finalize_game(env.trajectory, o);
      buffer.add(samples);
      stats.samples_added += samples.size();
      stats.records.push_back(make_record(env.moves, env.state));
      ++stats.games;
      if (env.versus_past) ++stats.versus_past_games;
      switch (o.result) {
        case Result::kAttackerWin: ++stats.attacker_wins; break;
        case Result::kDefenderWin: ++stats.defender_wins; break;
        case Result::kDraw: ++stats.draws; break;
      }
      pieces += stats.records.back().final_piece_count;
      reset(env, i, pool);
    }
  }
  if (stats.games > 0) stats.mean_pieces_remaining = pieces / stats.games;
  if (stats.current_model_plies > 0) stats.mean_root_entropy = entropy / stats.current_model_plies;
  stats.buffer_size = buffer.size();
  return stats;
}

}  // namespace tablutzero
