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
#include <span>
#include <vector>

#include "tablutzero/encoding.hpp"
#include "tablutzero/mcts.hpp"
#include "tablutzero/network.hpp"
#include "tablutzero/rules.hpp"

namespace tablutzero {

// Tablut seen through the search's game contract.
struct TablutGame {
  using State = GameState;

  int num_actions() const { return kNumActions; }
  std::vector<int> legal_actions(const GameState& s) const { return tablutzero::legal_actions(s); }
  GameState apply(const GameState& s, int action) const {
    return apply_move_unchecked(s, action_to_move(action));
  }
  bool is_terminal(const GameState& s) const { return s.is_terminal(); }
  double terminal_value(const GameState& s) const {
    return outcome_value_for(*s.outcome(), s.to_move());
  }
  int player(const GameState& s) const { return static_cast<int>(s.to_move()); }
};

// One network forward pass over `states`, each answered by the head of its
// side to move.
std::vector<Evaluation> evaluate_states(const Params<float>& params,
                                        std::span<const GameState* const> states);

struct SearchRequest {
  GameState state;
  const Params<float>* params = nullptr;
  SearchConfig config;
};

// Runs one search per request in lock step, batching the leaf evaluations of
// all searches that share a network into one forward pass per round.
std::vector<SearchResult> run_searches(std::span<const SearchRequest> requests);

}  // namespace tablutzero
