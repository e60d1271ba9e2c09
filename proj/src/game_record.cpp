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

#include "tablutzero/game_record.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace tablutzero {

using nlohmann::json;

GameRecord make_record(std::vector<Move> moves, const GameState& final_state) {
  if (!final_state.is_terminal()) throw std::invalid_argument("game record of an unfinished game");
  GameRecord r;
  r.moves = std::move(moves);
  r.outcome = *final_state.outcome();
  r.ply_count = final_state.ply();
  r.final_piece_count = final_state.board().piece_count();
  return r;
}

std::string to_jsonl(const GameRecord& r) {
  json moves = json::array();
  for (const Move& m : r.moves) moves.push_back({m.from, m.to});
  json j;
  j["moves"] = std::move(moves);
  j["outcome"] = result_name(r.outcome.result);
  j["reason"] = reason_name(r.outcome.reason);
  j["ply_count"] = r.ply_count;
  j["final_piece_count"] = r.final_piece_count;
  return j.dump();
}

GameRecord parse_game_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("game record: ") + e.what());
  }
  GameRecord r;
  try {
    for (const auto& m : j.at("moves")) r.moves.push_back(Move{m.at(0).get<int>(), m.at(1).get<int>()});
    auto result = parse_result(j.at("outcome").get<std::string>());
    auto reason = parse_reason(j.at("reason").get<std::string>());
    if (!result || !reason) throw std::invalid_argument("game record: unknown outcome or reason");
    r.outcome = Outcome{*result, *reason};
    r.ply_count = j.at("ply_count").get<int>();
    r.final_piece_count = j.at("final_piece_count").get<int>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("game record: ") + e.what());
  }
  return r;
}

void write_records(std::ostream& out, const std::vector<GameRecord>& records) {
  for (const auto& r : records) out << to_jsonl(r) << '\n';
}

std::vector<GameRecord> read_records(std::istream& in) {
  std::vector<GameRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_game_record(line));
  }
  return out;
}

bool replay_matches(const GameRecord& r) {
  GameState s = GameState::initial();
  for (const Move& m : r.moves) {
    if (!is_legal(s, m)) return false;
    s = apply_move_unchecked(s, m);
  }
  return s.is_terminal() && *s.outcome() == r.outcome && s.ply() == r.ply_count &&
         s.board().piece_count() == r.final_piece_count;
}

}  // namespace tablutzero
