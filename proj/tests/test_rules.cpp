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


#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "capture_cases.hpp"
#include "oracles/rules_oracle.hpp"
#include "tablutzero/errors.hpp"
#include "tablutzero/rules.hpp"

namespace tz = tablutzero;
using tz::GameState;
using tz::Move;
using tz::Side;

TEST(Squares, NamesRoundTrip) {
  for (int sq = 0; sq < tz::kNumSquares; ++sq) {
    EXPECT_EQ(tz::parse_square(tz::square_name(sq)), sq);
  }
  EXPECT_EQ(tz::square_name(0), "a1");
  EXPECT_EQ(tz::square_name(tz::kThrone), "e5");
  EXPECT_FALSE(tz::parse_square("j1"));
  EXPECT_FALSE(tz::parse_square("a0"));
  EXPECT_FALSE(tz::parse_move("e3e5"));
}

TEST(InitialPosition, Layout) {
  const auto b = tz::initial_board();
  EXPECT_EQ(b.attackers.count(), 16);
  EXPECT_EQ(b.defenders.count(), 8);
  EXPECT_EQ(b.king, tz::kThrone);
  EXPECT_EQ(b.piece_count(), 25);
  const auto s = GameState::initial();
  EXPECT_EQ(s.to_move(), Side::kAttacker);
  EXPECT_FALSE(s.is_terminal());
  EXPECT_EQ(s.repetitions(), 1);
}

TEST(MoveGeneration, InitialAttackerMovesMatchFrozenCount) {
  // Count computed by tests/oracles/tablut_oracle.py.
  EXPECT_EQ(tz::legal_moves(GameState::initial()).size(), 72u);
}

TEST(MoveGeneration, PerftMatchesFrozenCounts) {
  const auto s = GameState::initial();
  EXPECT_EQ(tz::perft(s, 1), 72u);
  EXPECT_EQ(tz::perft(s, 2), 3944u);
  EXPECT_EQ(tz::perft(s, 3), 285728u);
}

TEST(MoveGeneration, MatchesBruteForceOnRandomPositions) {
  const auto positions = tz::oracle::random_positions(1000, 17);
  for (const auto& s : positions) {
    auto expected = tz::oracle::moves(s.board(), s.to_move());
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(tz::legal_moves(s), expected) << tz::render_board(s.board());
  }
}

TEST(MoveGeneration, ApplyMatchesBruteForceCaptures) {
  const auto positions = tz::oracle::random_positions(300, 5);
  for (const auto& s : positions) {
    for (const Move m : tz::legal_moves(s)) {
      ASSERT_EQ(tz::apply_move(s, m).board(), tz::oracle::play(s.board(), m))
          << tz::move_name(m) << "\n" << tz::render_board(s.board());
    }
  }
}

TEST(MoveGeneration, OutputIsSortedAndDuplicateFree) {
  for (const auto& s : tz::oracle::random_positions(200, 99)) {
    const auto ms = tz::legal_moves(s);
    EXPECT_TRUE(std::is_sorted(ms.begin(), ms.end()));
    EXPECT_EQ(std::set<Move>(ms.begin(), ms.end()).size(), ms.size());
  }
}

TEST(MoveGeneration, OnlyTheKingEntersThroneOrCorners) {
  for (const auto& s : tz::oracle::random_positions(300, 3)) {
    for (const Move m : tz::legal_moves(s)) {
      if (tz::is_restricted(m.to)) {
        EXPECT_EQ(m.from, s.board().king);
      }
    }
  }
}

TEST(MoveGeneration, EmptyThroneCanBeCrossed) {
  const auto b = tz::oracle::diagram(
      ".........  .........  .........  .........  A.......K  .........  .........  .........  .........");
  const auto ms = tz::legal_moves(b, Side::kAttacker);
  EXPECT_TRUE(std::find(ms.begin(), ms.end(), Move{36, 41}) != ms.end());
  EXPECT_TRUE(std::find(ms.begin(), ms.end(), Move{36, 40}) == ms.end());
}

TEST(MoveGeneration, PiecesBlockSliding) {
  const auto b = tz::oracle::diagram(
      "...A.....  .........  .........  ...D.....  .........  .........  .........  ......K..  .........");
  const auto ms = tz::legal_moves(b, Side::kAttacker);
  for (const Move m : ms) {
    if (m.from == 3 && tz::col_of(m.to) == 3) {
      EXPECT_LT(tz::row_of(m.to), 3);
    }
  }
}

TEST(MoveGeneration, IllegalMoveThrows) {
  const auto s = GameState::initial();
  EXPECT_THROW(tz::apply_move(s, Move{0, 1}), tz::ContractViolation);
  EXPECT_FALSE(tz::is_legal(s, Move{3, 40}));
}

TEST(Captures, HandBuiltCases) {
  const auto cases = tz::testing::capture_cases();
  EXPECT_GE(cases.size(), 20u);
  for (const auto& cc : cases) {
    const auto rep = tz::testing::run_case(cc);
    EXPECT_TRUE(rep.engine_ok) << cc.name << ": " << rep.detail;
    EXPECT_TRUE(rep.oracle_ok) << cc.name << " (oracle disagrees with the expected board)";
  }
}

TEST(Captures, ResolveListsVictims) {
  const auto b = tz::oracle::diagram(
      "....A....  ....D....  ..ADADA..  .........  .........  .........  ......K..  .........  .........");
  auto victims = tz::resolve_captures(b, Side::kAttacker, 22);
  std::sort(victims.begin(), victims.end());
  EXPECT_EQ(victims, (std::vector<int>{13, 21, 23}));
}

TEST(Terminal, TerminalStateRejectsMoveGeneration) {
  const auto b = tz::oracle::diagram(
      "........K  .........  .........  .........  .........  .........  A........  .........  .........");
  const auto s = GameState::from_board(b, Side::kAttacker);
  ASSERT_TRUE(s.is_terminal());
  EXPECT_EQ(s.outcome()->result, tz::Result::kDefenderWin);
  EXPECT_THROW(tz::legal_moves(s), tz::ContractViolation);
}

TEST(Terminal, OutcomeValueFromEachSide) {
  const tz::Outcome win{tz::Result::kAttackerWin, tz::OutcomeReason::kKingCaptured};
  EXPECT_EQ(tz::outcome_value_for(win, Side::kAttacker), 1);
  EXPECT_EQ(tz::outcome_value_for(win, Side::kDefender), -1);
  const tz::Outcome draw{tz::Result::kDraw, tz::OutcomeReason::kHalfmoveDraw};
  EXPECT_EQ(tz::outcome_value_for(draw, Side::kDefender), 0);
}

TEST(Repetition, KeysFollowPositions) {
  auto s = GameState::initial();
  const auto k0 = s.key();
  EXPECT_EQ(k0, tz::position_key(s.board(), s.to_move()));
  const auto m1 = *tz::parse_move("d1-d2");
  const auto m2 = *tz::parse_move("c5-c2");
  const auto m3 = *tz::parse_move("d2-d1");
  const auto m4 = *tz::parse_move("c2-c5");
  for (const auto m : {m1, m2, m3, m4}) s = tz::apply_move(s, m);
  EXPECT_EQ(s.key(), k0);
  EXPECT_EQ(s.repetitions(), 2);
  EXPECT_EQ(s.history().size(), 4u);
}

TEST(Repetition, CaptureClearsRepetitionMemory) {
  auto s = GameState::from_board(tz::oracle::diagram(
      ".........  .........  ..AD.....  .........  .........  ....A....  ......K..  .........  .A......."),
      Side::kAttacker);
  s = tz::apply_move(s, *tz::parse_move("e6-e3"));
  EXPECT_EQ(s.halfmove_clock(), 0);
  EXPECT_EQ(s.repetitions(), 1);
}

TEST(History, KeepsSevenMostRecentFirst) {
  std::mt19937_64 rng(4);
  auto s = GameState::initial();
  std::vector<tz::Board> boards{s.board()};
  for (int i = 0; i < 12 && !s.is_terminal(); ++i) {
    const auto ms = tz::legal_moves(s);
    s = tz::apply_move(s, ms[rng() % ms.size()]);
    boards.push_back(s.board());
  }
  const auto h = s.history();
  ASSERT_EQ(h.size(), 7u);
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(h[i].board, boards[boards.size() - 2 - i]);
  }
}

TEST(Properties, PieceCountNeverIncreasesAndKingStaysUnique) {
  std::mt19937_64 rng(8);
  for (int game = 0; game < 20; ++game) {
    auto s = GameState::initial();
    while (!s.is_terminal()) {
      const int before = s.board().piece_count();
      const auto ms = tz::legal_moves(s);
      s = tz::apply_move(s, ms[rng() % ms.size()]);
      EXPECT_LE(s.board().piece_count(), before);
      EXPECT_TRUE((s.board().attackers & s.board().defenders).empty());
      if (s.board().king_alive()) {
        EXPECT_FALSE(s.board().defenders.test(s.board().king));
      }
      EXPECT_LE(s.ply(), tz::kMaxPlies);
      EXPECT_LE(s.halfmove_clock(), tz::kNoCaptureDrawPlies);
    }
  }
}
