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

// Brute-force rules oracle. Written from the rule list with (row, col)
// arithmetic over a plain 9x9 array; shares nothing with the bitboard
// engine except the Board type used to exchange positions.

#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <vector>

#include "tablutzero/rules.hpp"

namespace tablutzero::oracle {

using Grid = std::array<std::array<char, 9>, 9>;  // 'A', 'D', 'K' or '.'

inline Grid to_grid(const Board& b) {
  Grid g;
  for (auto& row : g) row.fill('.');
  for (int sq = 0; sq < 81; ++sq) {
    if (b.attackers.test(sq)) g[sq / 9][sq % 9] = 'A';
    if (b.defenders.test(sq)) g[sq / 9][sq % 9] = 'D';
  }
  if (b.king >= 0) g[b.king / 9][b.king % 9] = 'K';
  return g;
}

inline Board from_grid(const Grid& g) {
  Board b;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      if (g[r][c] == 'A') b.attackers.set(r * 9 + c);
      if (g[r][c] == 'D') b.defenders.set(r * 9 + c);
      if (g[r][c] == 'K') b.king = r * 9 + c;
    }
  return b;
}

inline char side_of(char p) {
  if (p == 'A') return 'A';
  if (p == 'D' || p == 'K') return 'D';
  return 0;
}

inline bool special(int r, int c) {
  return (r == 4 && c == 4) || ((r == 0 || r == 8) && (c == 0 || c == 8));
}

// Every (from, to) pair over the whole board, filtered by the rules.
inline std::vector<Move> moves(const Board& b, Side side) {
  const Grid g = to_grid(b);
  const char me = side == Side::kAttacker ? 'A' : 'D';
  std::vector<Move> out;
  for (int from = 0; from < 81; ++from) {
    const int fr = from / 9, fc = from % 9;
    if (side_of(g[fr][fc]) != me) continue;
    for (int to = 0; to < 81; ++to) {
      const int tr = to / 9, tc = to % 9;
      if (to == from || (tr != fr && tc != fc)) continue;
      if (g[tr][tc] != '.') continue;
      if (special(tr, tc) && g[fr][fc] != 'K') continue;
      bool clear = true;
      if (tr == fr) {
        for (int c = std::min(fc, tc) + 1; c < std::max(fc, tc); ++c) clear = clear && g[fr][c] == '.';
      } else {
        for (int r = std::min(fr, tr) + 1; r < std::max(fr, tr); ++r) clear = clear && g[r][fc] == '.';
      }
      if (clear) out.push_back(Move{from, to});
    }
  }
  return out;
}

// Resolves one move on a grid: moves the piece, then removes every enemy
// piece flanked along a line through the destination.
inline Grid play(Grid g, Move m) {
  const int fr = m.from / 9, fc = m.from % 9, tr = m.to / 9, tc = m.to % 9;
  const char piece = g[fr][fc];
  g[fr][fc] = '.';
  g[tr][tc] = piece;
  const char me = side_of(piece);
  const bool king_home = g[4][4] == 'K';
  std::vector<std::pair<int, int>> dead;
  const int dirs[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (const auto& d : dirs) {
    const int vr = tr + d[0], vc = tc + d[1];
    const int ar = tr + 2 * d[0], ac = tc + 2 * d[1];
    if (ar < 0 || ar > 8 || ac < 0 || ac > 8) continue;
    const char victim = side_of(g[vr][vc]);
    if (victim == 0 || victim == me) continue;
    const bool corner = (ar == 0 || ar == 8) && (ac == 0 || ac == 8);
    const bool throne = ar == 4 && ac == 4;
    bool anvil = side_of(g[ar][ac]) == me;
    if (corner) anvil = true;
    if (throne && victim == 'A') anvil = true;
    if (throne && victim == 'D' && !king_home) anvil = true;
    if (anvil) dead.emplace_back(vr, vc);
  }
  for (auto [r, c] : dead) g[r][c] = '.';
  return g;
}

inline Board play(const Board& b, Move m) { return from_grid(play(to_grid(b), m)); }

// Positions reached by uniformly random play from the initial array.
inline std::vector<GameState> random_positions(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GameState> out;
  GameState s = GameState::initial();
  while (static_cast<int>(out.size()) < count) {
    if (s.is_terminal()) {
      s = GameState::initial();
      continue;
    }
    out.push_back(s);
    const auto ms = legal_moves(s);
    std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
    s = apply_move(s, ms[pick(rng)]);
  }
  return out;
}

// Board from nine rows of 'A', 'D', 'K' and '.' (whitespace ignored).
inline Board diagram(const std::string& text) {
  Grid g;
  int i = 0;
  for (char ch : text) {
    if (ch == 'A' || ch == 'D' || ch == 'K' || ch == '.') {
      g[i / 9][i % 9] = ch;
      ++i;
    }
  }
  if (i != 81) throw std::invalid_argument("diagram needs 81 cells");
  return from_grid(g);
}

}  // namespace tablutzero::oracle
