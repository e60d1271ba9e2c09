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

#include <iosfwd>
#include <string>
#include <vector>

#include "tablutzero/rules.hpp"

namespace tablutzero {

// One finished game, serialized as a single JSON Lines object:
//   {"moves": [[from, to], ...], "outcome": "AttackerWin",
//    "reason": "KingCaptured", "ply_count": 57, "final_piece_count": 19}
struct GameRecord {
  std::vector<Move> moves;
  Outcome outcome{Result::kDraw, OutcomeReason::kMaxPlyDraw};
  int ply_count = 0;
  int final_piece_count = 0;

  bool operator==(const GameRecord&) const = default;
};

GameRecord make_record(std::vector<Move> moves, const GameState& final_state);

std::string to_jsonl(const GameRecord& r);
// Throws std::invalid_argument on malformed input.
GameRecord parse_game_record(const std::string& line);

void write_records(std::ostream& out, const std::vector<GameRecord>& records);
std::vector<GameRecord> read_records(std::istream& in);

// Replays the moves from the initial position and checks the stored outcome.
bool replay_matches(const GameRecord& r);

}  // namespace tablutzero
