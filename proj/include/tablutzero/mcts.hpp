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

// Gumbel-style Monte Carlo tree search for two-player zero-sum games.
//
// Root: sample Gumbel noise g(a), keep the top-m actions by g(a) + logit(a),
// then spend the simulation budget by sequential halving, ranking survivors
// by g(a) + logit(a) + sigma(completed_q(a)). Interior nodes pick
// argmax pi'(a) - N(a) / (1 + sum N), deterministically. The policy target
// is pi' = softmax(logits + sigma(completed_q)) at the root.
//
// GumbelSearch is a resumable state machine: pending() exposes the state
// waiting for a network evaluation and supply() hands the evaluation back,
// so a caller can gather leaves from many searches into one batched forward
// pass. run_search() is the synchronous wrapper.
//
// Values are always from the perspective of the player to move at the state
// they describe; q-values on an edge are from the perspective of the player
// choosing that edge.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tablutzero/errors.hpp"

namespace tablutzero {

template <typename G>
concept SearchGame = std::copy_constructible<typename G::State> &&
    requires(const G& g, const typename G::State& s, int a) {
      { g.num_actions() } -> std::convertible_to<int>;
      { g.legal_actions(s) } -> std::same_as<std::vector<int>>;  // ascending
      { g.apply(s, a) } -> std::same_as<typename G::State>;
      { g.is_terminal(s) } -> std::convertible_to<bool>;
      { g.terminal_value(s) } -> std::convertible_to<double>;  // for player(s)
      { g.player(s) } -> std::convertible_to<int>;
    };

struct SearchConfig {
  int simulations = 128;
  int max_considered_actions = 16;
  double c_visit = 50.0;
  double c_scale = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (simulations < 2) throw ContractViolation("simulations must be >= 2");
    if (max_considered_actions < 2) throw ContractViolation("max_considered_actions must be >= 2");
  }
};

// Network output for one state: logits over the whole action space and a
// value in [-1, 1] for the player to move.
struct Evaluation {
  std::vector<float> logits;
  double value = 0.0;
};

struct RootStats {
  std::vector<int> actions;  // legal actions, ascending
  std::vector<double> prior_logits;
  std::vector<double> gumbel;
  std::vector<int> visits;
  std::vector<double> q;  // 0 where unvisited
  std::vector<double> policy;
  double raw_value = 0.0;
};

struct SearchResult {
  int chosen_action = -1;
  std::vector<float> policy;  // pi' over the whole action space
  double root_value = 0.0;    // mixed value estimate
  double root_entropy = 0.0;  // entropy of the network prior at the root
  int evaluations = 0;        // leaf evaluations, terminal leaves included
  RootStats root;
};

// Statistics of one expanded node over its legal actions.
struct NodeStats {
  std::vector<double> logits;
  std::vector<int> visits;
  std::vector<double> value_sum;
  double raw_value = 0.0;

  NodeStats() = default;
  NodeStats(std::vector<double> l, double v)
      : logits(std::move(l)), visits(logits.size(), 0), value_sum(logits.size(), 0.0), raw_value(v) {}

  int total_visits() const { return std::accumulate(visits.begin(), visits.end(), 0); }
  int max_visits() const { return visits.empty() ? 0 : *std::max_element(visits.begin(), visits.end()); }
  double q(std::size_t a) const { return visits[a] > 0 ? value_sum[a] / visits[a] : 0.0; }
};

inline double sigma(double q, int max_visit, const SearchConfig& cfg) {
  return (cfg.c_visit + max_visit) * cfg.c_scale * q;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - mx));
  for (double& v : p) v /= z;
  return p;
}

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// (raw + (sum N / sum_visited prior) * sum_visited prior * q) / (1 + sum N)
inline double mixed_value(const NodeStats& n) {
  const int total = n.total_visits();
  if (total == 0) return n.raw_value;
  const auto prior = softmax(n.logits);
  double prob_sum = 0.0, weighted = 0.0;
  for (std::size_t a = 0; a < prior.size(); ++a) {
    if (n.visits[a] == 0) continue;
    const double pa = std::max(prior[a], std::numeric_limits<double>::min());
    prob_sum += pa;
    weighted += pa * n.q(a);
  }
  return (n.raw_value + total * weighted / prob_sum) / (1.0 + total);
}

// q for visited actions, the mixed value elsewhere, min-max normalized over
// the raw value and the visited q-values. Entries lie in [0, 1].
inline std::vector<double> completed_q(const NodeStats& n) {
  const double vmix = mixed_value(n);
  double lo = n.raw_value, hi = n.raw_value;
  for (std::size_t a = 0; a < n.visits.size(); ++a) {
    if (n.visits[a] == 0) continue;
    lo = std::min(lo, n.q(a));
    hi = std::max(hi, n.q(a));
  }
  const double scale = std::max(hi - lo, 1e-8);
  std::vector<double> out(n.visits.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    const double v = n.visits[a] > 0 ? n.q(a) : vmix;
    out[a] = std::clamp((v - lo) / scale, 0.0, 1.0);
  }
  return out;
}

inline std::vector<double> improved_policy(const NodeStats& n, const SearchConfig& cfg) {
  const auto cq = completed_q(n);
  const int max_visit = n.max_visits();
  std::vector<double> z(n.logits.size());
  for (std::size_t a = 0; a < z.size(); ++a) z[a] = n.logits[a] + sigma(cq[a], max_visit, cfg);
  return softmax(z);
}

// Slot of argmax pi'(a) - N(a) / (1 + sum N); lowest slot on ties.
inline int select_child_interior(const NodeStats& n, const SearchConfig& cfg) {
  const auto pi = improved_policy(n, cfg);
  const double denom = 1.0 + n.total_visits();
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pi.size(); ++a) {
    const double s = pi[a] - n.visits[a] / denom;
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(a);
    }
  }
  return best;
}

struct PathStep {
  NodeStats* node;
  int slot;
  int player;  // player choosing the edge
};

// leaf_value is for leaf_player; edges chosen by that player gain it, the
// opponent's edges gain its negation.
inline void backup(std::span<const PathStep> path, double leaf_value, int leaf_player) {
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    it->node->visits[it->slot] += 1;
    it->node->value_sum[it->slot] += it->player == leaf_player ? leaf_value : -leaf_value;
  }
}

struct HalvingPhase {
  int survivors = 0;
  int visits_per_action = 0;
};

// Nominal schedule for m considered actions and budget n: ceil(log2 m)
// phases, survivors halving (rounding up); every phase but the last gets
// floor(n / (phases * survivors)) visits per action (at least one) and the
// last phase takes what is left, split evenly. Leftover simulations that do
// not divide evenly go to the final survivor after the last phase.
inline std::vector<HalvingPhase> halving_schedule(int m, int n) {
  std::vector<HalvingPhase> phases;
  if (m <= 1) return phases;
  const int num_phases = static_cast<int>(std::ceil(std::log2(static_cast<double>(m))));
  int survivors = m;
  int remaining = n;
  for (int p = 0; p < num_phases && remaining > 0; ++p) {
    int k = p + 1 < num_phases ? std::max(1, n / (num_phases * survivors))
                               : std::max(1, remaining / survivors);
    phases.push_back({survivors, k});
    remaining -= std::min(remaining, k * survivors);
    survivors = (survivors + 1) / 2;
  }
  return phases;
}

template <SearchGame Game>
class GumbelSearch {
 public:
  using State = typename Game::State;

  GumbelSearch(const Game& game, State root, SearchConfig cfg) : game_(game), cfg_(cfg), rng_(cfg.rng_seed) {
    cfg_.validate();
    if (game_.is_terminal(root)) throw SearchError("search started from a terminal state");
    nodes_.push_back(make_node(std::move(root)));
    pending_ = 0;
  }

  bool done() const { return pending_ < 0 && sims_done_ >= cfg_.simulations; }

  // The state awaiting an evaluation, or nullptr once the search is done.
  const State* pending() const { return pending_ >= 0 ? &nodes_[pending_].state : nullptr; }

  void supply(const Evaluation& eval) {
    if (pending_ < 0) throw ContractViolation("supply() without a pending evaluation");
    Node& node = nodes_[pending_];
    if (!std::isfinite(eval.value)) throw SearchError("evaluator returned a non-finite value");
    if (static_cast<int>(eval.logits.size()) != game_.num_actions())
      throw SearchError("evaluator returned logits of the wrong size");
    std::vector<double> logits(node.actions.size());
    for (std::size_t i = 0; i < node.actions.size(); ++i) {
      const double l = eval.logits[node.actions[i]];
      if (!std::isfinite(l)) throw SearchError("evaluator returned a non-finite logit");
      logits[i] = l;
    }
    node.stats = NodeStats(std::move(logits), eval.value);
    node.expanded = true;
    const int leaf = pending_;
    if (leaf != 0) ++evaluations_;
    pending_ = -1;
    if (leaf == 0) {
      start_root();
    } else {
      finish_simulation(eval.value, nodes_[leaf].player);
    }
    advance();
  }

  SearchResult result() const {
    if (!done()) throw ContractViolation("search result requested before completion");
    const Node& root = nodes_[0];
    SearchResult r;
    r.chosen_action = root.actions[chosen_slot_];
    r.evaluations = evaluations_;
    const auto pi = improved_policy(root.stats, cfg_);
    r.policy.assign(game_.num_actions(), 0.0f);
    for (std::size_t i = 0; i < pi.size(); ++i) r.policy[root.actions[i]] = static_cast<float>(pi[i]);
    r.root_value = mixed_value(root.stats);
    r.root_entropy = entropy(softmax(root.stats.logits));
    r.root.actions = root.actions;
    r.root.prior_logits = root.stats.logits;
    r.root.gumbel = gumbel_;
    r.root.visits = root.stats.visits;
    r.root.q.resize(root.actions.size());
    for (std::size_t i = 0; i < root.actions.size(); ++i) r.root.q[i] = root.stats.q(i);
    r.root.policy = pi;
    r.root.raw_value = root.stats.raw_value;
    return r;
  }

  // Statistics of the root child reached by `slot`, or nullptr when that
  // child was never expanded (or is terminal).
  const NodeStats* root_child_stats(int slot) const {
    const int c = nodes_[0].children.at(slot);
    if (c < 0 || !nodes_[c].expanded) return nullptr;
    return &nodes_[c].stats;
  }

 private:
  struct Node {
    State state;
    int player = 0;
    bool terminal = false;
    bool expanded = false;
    std::vector<int> actions;
    std::vector<int> children;
    NodeStats stats;
  };

  Node make_node(State s) {
    Node n;
    n.state = std::move(s);
    n.player = game_.player(n.state);
    n.terminal = game_.is_terminal(n.state);
    if (!n.terminal) {
      n.actions = game_.legal_actions(n.state);
      if (n.actions.empty()) throw SearchError("non-terminal state without legal actions");
      n.children.assign(n.actions.size(), -1);
    }
    return n;
  }

  double root_score(int slot, const std::vector<double>& cq, int max_visit) const {
    return gumbel_[slot] + nodes_[0].stats.logits[slot] + sigma(cq[slot], max_visit, cfg_);
  }

  // Survivors ordered best first by the current root score.
  void rank_survivors() {
    const NodeStats& st = nodes_[0].stats;
    const auto cq = completed_q(st);
    const int mv = st.max_visits();
    std::vector<double> score(st.logits.size());
    for (int s : survivors_) score[s] = root_score(s, cq, mv);
    std::stable_sort(survivors_.begin(), survivors_.end(),
                     [&](int a, int b) { return score[a] > score[b]; });
  }

  void start_root() {
    const Node& root = nodes_[0];
    const int num_legal = static_cast<int>(root.actions.size());
    std::extreme_value_distribution<double> gumbel(0.0, 1.0);
    gumbel_.resize(num_legal);
    for (double& g : gumbel_) g = gumbel(rng_);
    const int m = std::min(cfg_.max_considered_actions, num_legal);
    std::vector<int> order(num_legal);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return gumbel_[a] + root.stats.logits[a] > gumbel_[b] + root.stats.logits[b];
    });
    survivors_.assign(order.begin(), order.begin() + m);
    num_phases_ = m > 1 ? static_cast<int>(std::ceil(std::log2(static_cast<double>(m)))) : 0;
    phase_ = 0;
    plan_phase();
  }

  // Fills the visit queue for the current phase, or for the leftover budget
  // once all phases are done.
  void plan_phase() {
    queue_.clear();
    queue_pos_ = 0;
    const int remaining = cfg_.simulations - sims_done_;
    if (remaining <= 0) return;
    if (phase_ >= num_phases_) {
      queue_.assign(remaining, survivors_.front());
      return;
    }
    const int s = static_cast<int>(survivors_.size());
    const int k = phase_ + 1 < num_phases_ ? std::max(1, cfg_.simulations / (num_phases_ * s))
                                           : std::max(1, remaining / s);
    for (int round = 0; round < k; ++round)
      for (int slot : survivors_) queue_.push_back(slot);
    if (static_cast<int>(queue_.size()) > remaining) queue_.resize(remaining);
  }

  void end_phase() {
    rank_survivors();
    survivors_.resize((survivors_.size() + 1) / 2);
    ++phase_;
  }

  int next_root_slot() {
    while (queue_pos_ >= static_cast<int>(queue_.size())) {
      if (phase_ < num_phases_) end_phase();
      plan_phase();
    }
    return queue_[queue_pos_++];
  }

  // Runs simulations until one needs a network evaluation or the budget is spent.
  void advance() {
    while (pending_ < 0 && sims_done_ < cfg_.simulations) {
      path_.clear();
      int idx = 0;
      int slot = next_root_slot();
      for (;;) {
        path_.push_back({idx, slot});
        int child = nodes_[idx].children[slot];
        if (child < 0) {
          State next = game_.apply(nodes_[idx].state, nodes_[idx].actions[slot]);
          child = static_cast<int>(nodes_.size());
          nodes_.push_back(make_node(std::move(next)));
          nodes_[idx].children[slot] = child;
        }
        const Node& c = nodes_[child];
        if (c.terminal) {
          ++evaluations_;
          finish_simulation(game_.terminal_value(c.state), c.player);
          break;
        }
        if (!c.expanded) {
          pending_ = child;
          return;
        }
        idx = child;
        slot = select_child_interior(nodes_[idx].stats, cfg_);
      }
    }
    if (sims_done_ >= cfg_.simulations && chosen_slot_ < 0) finish_root();
  }

  void finish_simulation(double value, int leaf_player) {
    steps_.clear();
    for (const auto& [idx, slot] : path_) steps_.push_back({&nodes_[idx].stats, slot, nodes_[idx].player});
    backup(steps_, value, leaf_player);
    ++sims_done_;
  }

  void finish_root() {
    while (phase_ < num_phases_) end_phase();
    rank_survivors();
    chosen_slot_ = survivors_.front();
  }

  const Game& game_;
  SearchConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  int pending_ = -1;
  int sims_done_ = 0;
  int evaluations_ = 0;
  std::vector<double> gumbel_;
  std::vector<int> survivors_;
  int num_phases_ = 0;
  int phase_ = 0;
  std::vector<int> queue_;
  int queue_pos_ = 0;
  int chosen_slot_ = -1;
  std::vector<std::pair<int, int>> path_;
  std::vector<PathStep> steps_;
};

template <SearchGame Game>
SearchResult run_search(const typename Game::State& root, const Game& game,
                        const std::function<Evaluation(const typename Game::State&)>& evaluate,
                        const SearchConfig& cfg) {
  GumbelSearch<Game> search(game, root, cfg);
  while (const auto* state = search.pending()) search.supply(evaluate(*state));
  return search.result();
}

// Root statistics as JSON for diagnostics.
inline nlohmann::json root_dump(const SearchResult& r) {
  nlohmann::json j;
  j["chosen_action"] = r.chosen_action;
  j["root_value"] = r.root_value;
  j["root_entropy"] = r.root_entropy;
  j["raw_value"] = r.root.raw_value;
  j["actions"] = r.root.actions;
  j["visits"] = r.root.visits;
  j["q"] = r.root.q;
  j["gumbel"] = r.root.gumbel;
  j["prior_logits"] = r.root.prior_logits;
  j["policy"] = r.root.policy;
  return j;
}

}  // namespace tablutzero
