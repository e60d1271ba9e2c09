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


#include "tablutzero/agents.hpp"

#include <random>

#include "tablutzero/errors.hpp"
#include "tablutzero/tablut_search.hpp"

namespace tablutzero {

std::vector<PlayedGame> play_games(const Agent& a, const Agent& b, int games, int a_attacker_games,
                                   std::uint64_t seed) {
  if (games < 0 || a_attacker_games < 0 || a_attacker_games > games)
    throw ContractViolation("invalid game counts");
  if (a.name == b.name) throw ContractViolation("agents need distinct names");

  struct Table {
    const Agent* attacker = nullptr;
    const Agent* defender = nullptr;
    GameState state = GameState::initial();
    std::vector<Move> moves;
    std::mt19937_64 rng;
  };
  std::vector<Table> tables;
  for (int g = 0; g < games; ++g) {
    const bool a_attacks = g < a_attacker_games;
    Table t;
    t.attacker = a_attacks ? &a : &b;
    t.defender = a_attacks ? &b : &a;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(g), 0xe7a1u};
    t.rng.seed(seq);
    tables.push_back(std::move(t));
  }

  for (;;) {
    std::vector<std::size_t> searching;
    std::vector<SearchRequest> requests;
    bool active = false;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      Table& t = tables[i];
      if (t.state.is_terminal()) continue;
      active = true;
      const Agent& mover = t.state.to_move() == Side::kAttacker ? *t.attacker : *t.defender;
      if (mover.is_random()) {
        const auto legal = legal_moves(t.state);
        std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
        const Move m = legal[pick(t.rng)];
        t.state = apply_move(t.state, m);
        t.moves.push_back(m);
        continue;
      }
      SearchRequest r;
      r.state = t.state;
      r.params = mover.params.get();
      r.config.simulations = mover.simulations;
      r.config.max_considered_actions = mover.max_considered_actions;
      r.config.rng_seed = t.rng();
      requests.push_back(std::move(r));
      searching.push_back(i);
    }
    if (!active) break;
    if (requests.empty()) continue;
    const auto results = run_searches(requests);
    for (std::size_t j = 0; j < searching.size(); ++j) {
      Table& t = tables[searching[j]];
      const Move m = action_to_move(results[j].chosen_action);
      t.state = apply_move(t.state, m);
      t.moves.push_back(m);
    }
  }

  std::vector<PlayedGame> out;
  out.reserve(tables.size());
  for (auto& t : tables) {
    PlayedGame g;
    g.match.first = t.attacker->name;
    g.match.second = t.defender->name;
    switch (t.state.outcome()->result) {
      case Result::kAttackerWin: g.match.result = MatchResult::kFirstWin; break;
      case Result::kDefenderWin: g.match.result = MatchResult::kSecondWin; break;
      case Result::kDraw: g.match.result = MatchResult::kDraw; break;
    }
    g.record = make_record(std::move(t.moves), t.state);
    out.push_back(std::move(g));
  }
  return out;
}

int wins_of(const std::vector<PlayedGame>& games, const std::string& agent) {
  int wins = 0;
  for (const auto& g : games) {
    if (g.match.result == MatchResult::kFirstWin && g.match.first == agent) ++wins;
    if (g.match.result == MatchResult::kSecondWin && g.match.second == agent) ++wins;
  }
  return wins;
}

}  // namespace tablutzero
