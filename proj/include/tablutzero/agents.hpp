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
#include <memory>
#include <string>
#include <vector>

#include "tablutzero/game_record.hpp"
#include "tablutzero/network.hpp"
#include "tablutzero/rating.hpp"

namespace tablutzero {

// A player for evaluation games: a network searched with `simulations`
// simulations per move, or, without parameters or simulations, a uniform
// random choice among the legal moves.
struct Agent {
  std::string name;
  std::shared_ptr<const Params<float>> params;
  int simulations = 0;
  int max_considered_actions = 16;

  bool is_random() const { return params == nullptr || simulations == 0; }
  static Agent random(std::string name = "random") { return Agent{std::move(name), nullptr, 0, 16}; }
};

struct PlayedGame {
  MatchRecord match;
  GameRecord record;
};

// Plays `games` games between a and b, all advanced in lock step so that the
// searches of one round share forward passes. `a` is the attacker in the
// first `a_attacker_games` games. Each game draws from its own seeded stream.
std::vector<PlayedGame> play_games(const Agent& a, const Agent& b, int games, int a_attacker_games,
                                   std::uint64_t seed);

// Wins of `agent` counted over the games it took part in.
int wins_of(const std::vector<PlayedGame>& games, const std::string& agent);

}  // namespace tablutzero
