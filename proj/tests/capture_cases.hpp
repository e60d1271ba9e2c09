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

// Hand-built capture and terminal positions. Each case starts from a diagram
// (row 0 first, file a on the left), plays one or more moves and lists the
// expected board and outcome. Shared by the unit tests and the acceptance
// runner.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oracles/rules_oracle.hpp"
#include "tablutzero/rules.hpp"

namespace tablutzero::testing {

struct CaptureCase {
  std::string name;
  std::string before;
  Side to_move;
  std::vector<std::string> moves;
  std::string after;  // empty: only the outcome is checked
  std::optional<Outcome> outcome;
  int ply = 0;
  int halfmove = 0;
  std::optional<int> halfmove_after;
};

inline std::vector<CaptureCase> capture_cases() {
  using O = Outcome;
  std::vector<CaptureCase> c;
  c.push_back({"horizontal sandwich, passing the empty throne",
               ".........  .........  ..AD.....  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"},
               ".........  .........  ..A.A....  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"vertical sandwich",
               ".........  .....A...  .....D...  A........  .........  .........  ......K..  .........  .........",
               Side::kAttacker, {"a4-f4"},
               ".........  .....A...  .........  .....A...  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"moving between two enemies is safe",
               ".........  .........  ..A.A....  .........  .........  ...D.....  ......K..  .........  .........",
               Side::kDefender, {"d6-d3"},
               ".........  .........  ..ADA....  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 1});
  c.push_back({"double capture",
               ".........  .........  ..AD.DA..  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"},
               ".........  .........  ..A.A.A..  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"triple capture",
               "....A....  ....D....  ..AD.DA..  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"},
               "....A....  .........  ..A.A.A..  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"king acts as the anvil",
               "....A....  .........  .........  .........  .........  .........  .KA......  .........  ...D.....",
               Side::kDefender, {"d9-d7"},
               "....A....  .........  .........  .........  .........  .........  .K.D.....  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"king as the capturing piece",
               "....A....  .........  .........  .........  .........  .........  .DA......  .........  ...K.....",
               Side::kDefender, {"d9-d7"},
               "....A....  .........  .........  .........  .........  .........  .D.K.....  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"corner is hostile to attackers",
               ".A.......  .........  ..D......  .........  ......A..  .........  ......K..  .........  .........",
               Side::kDefender, {"c3-c1"},
               "..D......  .........  .........  .........  ......A..  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"corner is hostile to defenders",
               ".........  D........  .....A...  .........  .........  .........  ......K..  .........  .........",
               Side::kAttacker, {"f3-a3"},
               ".........  .........  A........  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"empty throne is hostile to attackers",
               "....A....  .........  .........  .........  ...A.....  .........  ......K..  ..D......  .........",
               Side::kDefender, {"c8-c5"},
               "....A....  .........  .........  .........  ..D......  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"empty throne is hostile to defenders",
               ".........  .........  A........  ....D....  .........  .........  ......K..  .........  .........",
               Side::kAttacker, {"a3-e3"},
               ".........  .........  ....A....  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 0});
  c.push_back({"throne holding the king is not hostile to defenders",
               ".........  .........  A........  ....D....  ....K....  .........  .........  .........  .........",
               Side::kAttacker, {"a3-e3"},
               ".........  .........  ....A....  ....D....  ....K....  .........  .........  .........  .........",
               std::nullopt, 0, 0, 1});
  c.push_back({"king on the throne flanks an attacker",
               ".........  .........  ........D  ....A....  ....K....  .........  .........  .........  ....A....",
               Side::kDefender, {"i3-e3"},
               ".........  .........  ....D....  .........  ....K....  .........  .........  .........  ....A....",
               std::nullopt, 0, 0, 0});
  c.push_back({"king captured between two attackers",
               ".........  .........  ..AK.....  .........  .........  .........  ....A....  .........  .........",
               Side::kAttacker, {"e7-e3"},
               ".........  .........  ..A.A....  .........  .........  .........  .........  .........  .........",
               O{Result::kAttackerWin, OutcomeReason::kKingCaptured}, 0, 0, 0});
  c.push_back({"king captured against a corner",
               ".K.......  .........  .........  ..A......  .........  .........  .........  .........  .........",
               Side::kAttacker, {"c4-c1"},
               "..A......  .........  .........  .........  .........  .........  .........  .........  .........",
               O{Result::kAttackerWin, OutcomeReason::kKingCaptured}, 0, 0, 0});
  c.push_back({"king captured against the empty throne",
               ".........  .........  A........  ....K....  .........  .........  .........  .........  .........",
               Side::kAttacker, {"a3-e3"},
               ".........  .........  ....A....  .........  .........  .........  .........  .........  .........",
               O{Result::kAttackerWin, OutcomeReason::kKingCaptured}, 0, 0, 0});
  c.push_back({"king moving between two attackers is safe",
               ".........  .........  ..A.A....  .........  .........  .........  ...K.....  .........  .........",
               Side::kDefender, {"d7-d3"},
               ".........  .........  ..AKA....  .........  .........  .........  .........  .........  .........",
               std::nullopt, 0, 0, 1});
  c.push_back({"king escapes to a corner",
               ".........  .........  .........  .........  ........K  .........  A........  .........  .........",
               Side::kDefender, {"i5-i1"},
               "........K  .........  .........  .........  .........  .........  A........  .........  .........",
               O{Result::kDefenderWin, OutcomeReason::kKingEscaped}, 0, 0, 1});
  c.push_back({"no capture without an anvil",
               ".........  .........  ...D.....  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"},
               ".........  .........  ...DA....  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 1});
  c.push_back({"no capture against the board edge",
               "...D.....  .......A.  .........  .........  .........  .........  ......K..  .........  .........",
               Side::kAttacker, {"h2-d2"},
               "...D.....  ...A.....  .........  .........  .........  .........  ......K..  .........  .........",
               std::nullopt, 0, 0, 1});
  c.push_back({"existing sandwiches are not resolved by other moves",
               "....A....  .........  .........  .........  .........  ADA......  ......K..  .........  .........",
               Side::kAttacker, {"e1-g1"},
               "......A..  .........  .........  .........  .........  ADA......  ......K..  .........  .........",
               std::nullopt, 0, 0, 1});
  c.push_back({"side left without moves loses",
               ".AD......  .....D...  .........  .........  .........  .........  ......K..  .........  .........",
               Side::kDefender, {"f2-b2"},
               ".AD......  .D.......  .........  .........  .........  .........  ......K..  .........  .........",
               O{Result::kDefenderWin, OutcomeReason::kNoMoves}, 0, 0, 1});
  c.push_back({"capturing the last attacker leaves it without moves",
               ".........  .........  .........  .........  .........  .........  .DA......  .........  ...K.....",
               Side::kDefender, {"d9-d7"},
               ".........  .........  .........  .........  .........  .........  .D.K.....  .........  .........",
               O{Result::kDefenderWin, OutcomeReason::kNoMoves}, 0, 0, 0});
  c.push_back({"hundred plies without capture is a draw",
               ".........  .........  ...D.....  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"}, "", O{Result::kDraw, OutcomeReason::kHalfmoveDraw}, 99, 99, 100});
  c.push_back({"capture resets the no-capture clock",
               ".........  .........  ..AD.....  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"}, "", std::nullopt, 99, 99, 0});
  c.push_back({"512 plies is a draw",
               ".........  .........  ...D.....  .........  .........  ....A....  ......K..  .........  .........",
               Side::kAttacker, {"e6-e3"}, "", O{Result::kDraw, OutcomeReason::kMaxPlyDraw}, 511, 0, 1});
  c.push_back({"third repetition loses for the player who makes it",
               ".........  .........  .........  .........  .........  .........  ......K..  .........  .A.......",
               Side::kAttacker,
               {"b9-c9", "g7-g6", "c9-b9", "g6-g7", "b9-c9", "g7-g6", "c9-b9", "g6-g7"},
               ".........  .........  .........  .........  .........  .........  ......K..  .........  .A.......",
               O{Result::kAttackerWin, OutcomeReason::kThirdRepetition}, 0, 0, std::nullopt});
  return c;
}

struct CaseReport {
  bool engine_ok = false;
  bool oracle_ok = true;  // single-move cases only
  std::string detail;
};

inline CaseReport run_case(const CaptureCase& cc) {
  CaseReport rep;
  GameState s = GameState::from_board(oracle::diagram(cc.before), cc.to_move, cc.ply, cc.halfmove);
  Board oracle_board = s.board();
  for (const auto& text : cc.moves) {
    const auto m = parse_move(text);
    if (!m || !is_legal(s, *m)) {
      rep.detail = "move " + text + " is not legal";
      return rep;
    }
    oracle_board = oracle::play(oracle_board, *m);
    s = apply_move(s, *m);
  }
  bool ok = true;
  if (!cc.after.empty()) {
    const Board expected = oracle::diagram(cc.after);
    if (!(s.board() == expected)) {
      ok = false;
      rep.detail += "board differs:\n" + render_board(s.board());
    }
    rep.oracle_ok = oracle_board == expected;
  }
  if (s.outcome() != cc.outcome) {
    ok = false;
    rep.detail += "outcome differs";
  }
  if (cc.halfmove_after && s.halfmove_clock() != *cc.halfmove_after) {
    ok = false;
    rep.detail += " halfmove clock " + std::to_string(s.halfmove_clock());
  }
  rep.engine_ok = ok;
  return rep;
}

}  // namespace tablutzero::testing
