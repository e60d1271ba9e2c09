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

#include "tablutzero/encoding.hpp"

#include <algorithm>
#include <string>

#include "tablutzero/errors.hpp"

namespace tablutzero {
namespace {

constexpr std::array<int, 4> kRowStep = {-1, 0, 1, 0};
constexpr std::array<int, 4> kColStep = {0, 1, 0, -1};

int normalize_turns(int k) { return ((k % 4) + 4) % 4; }

void fill_plane(std::span<float> out, int plane, float value) {
  for (Square sq = 0; sq < kNumSquares; ++sq) out[sq * kNumPlanes + plane] = value;
}

void encode_step(std::span<float> out, int step, const PositionSnapshot& snap, Side to_move) {
  const int base = step * kPlanesPerStep;
  const Bitboard& friendly =
      to_move == Side::kAttacker ? snap.board.attackers : snap.board.defenders;
  const Bitboard& enemy =
      to_move == Side::kAttacker ? snap.board.defenders : snap.board.attackers;
  friendly.for_each([&](Square sq) { out[sq * kNumPlanes + base] = 1.0f; });
  enemy.for_each([&](Square sq) { out[sq * kNumPlanes + base + 1] = 1.0f; });
  if (snap.board.king_alive()) out[snap.board.king * kNumPlanes + base + 2] = 1.0f;
  if (snap.repetitions >= 2) fill_plane(out, base + 3, 1.0f);
  if (snap.repetitions >= 3) fill_plane(out, base + 4, 1.0f);
}

void encode_window(std::span<const PositionSnapshot> steps, Side to_move, int ply,
                   int halfmove_clock, std::span<float> out) {
  std::fill(out.begin(), out.end(), 0.0f);
  for (std::size_t t = 0; t < steps.size() && t < kHistorySteps; ++t) {
    encode_step(out, static_cast<int>(t), steps[t], to_move);
  }
  fill_plane(out, kColorPlane, to_move == Side::kAttacker ? 1.0f : 0.0f);
  fill_plane(out, kMoveCountPlane,
             std::min(static_cast<float>(ply) / static_cast<float>(kMaxPlies), 1.0f));
  fill_plane(out, kHalfmovePlane,
             std::min(static_cast<float>(halfmove_clock) / static_cast<float>(kNoCaptureDrawPlies),
                      1.0f));
}

}  // namespace

HistoryWindow HistoryWindow::from_state(const GameState& s) {
  HistoryWindow h;
  h.steps.push_back(s.snapshot());
  for (const auto& snap : s.history()) h.steps.push_back(snap);
  h.to_move = s.to_move();
  h.ply = s.ply();
  h.halfmove_clock = s.halfmove_clock();
  return h;
}

HistoryWindow HistoryWindow::from_states(std::span<const GameState> states) {
  if (states.empty() || states.size() > kHistorySteps)
    throw ContractViolation("history window needs 1..8 states");
  HistoryWindow h;
  for (const auto& s : states) h.steps.push_back(s.snapshot());
  h.to_move = states.front().to_move();
  h.ply = states.front().ply();
  h.halfmove_clock = states.front().halfmove_clock();
  return h;
}

PlaneStack encode_state(const HistoryWindow& h) {
  if (h.steps.empty()) throw ContractViolation("empty history window");
  PlaneStack p;
  encode_window(h.steps, h.to_move, h.ply, h.halfmove_clock, p.data);
  return p;
}

void encode_state_into(const GameState& s, std::span<float> out) {
  if (out.size() != static_cast<std::size_t>(kPlaneStackSize))
    throw ContractViolation("plane buffer has the wrong size");
  std::array<PositionSnapshot, kHistorySteps> steps;
  steps[0] = s.snapshot();
  const auto hist = s.history();
  std::copy(hist.begin(), hist.end(), steps.begin() + 1);
  encode_window(std::span(steps.data(), hist.size() + 1), s.to_move(), s.ply(),
                s.halfmove_clock(), out);
}

PlaneStack encode_state(const GameState& s) {
  PlaneStack p;
  encode_state_into(s, p.data);
  return p;
}

std::optional<Move> try_action_to_move(int action) {
  if (action < 0 || action >= kNumActions) return std::nullopt;
  const Square from = action / kActionsPerSquare;
  const int dir = (action % kActionsPerSquare) / kMaxDistance;
  const int dist = action % kMaxDistance + 1;
  const int r = row_of(from) + kRowStep[dir] * dist;
  const int c = col_of(from) + kColStep[dir] * dist;
  if (!on_board(r, c)) return std::nullopt;
  return Move{from, square_at(r, c)};
}

Move action_to_move(int action) {
  auto m = try_action_to_move(action);
  if (!m) throw InvalidAction("action " + std::to_string(action) + " does not decode to an on-board move");
  return *m;
}

int move_to_action(Move m) {
  if (m.from < 0 || m.from >= kNumSquares || m.to < 0 || m.to >= kNumSquares || m.from == m.to)
    throw InvalidAction("move is not a slide between two board squares");
  const int dr = row_of(m.to) - row_of(m.from);
  const int dc = col_of(m.to) - col_of(m.from);
  int dir;
  int dist;
  if (dc == 0) {
    dir = dr < 0 ? 0 : 2;
    dist = dr < 0 ? -dr : dr;
  } else if (dr == 0) {
    dir = dc > 0 ? 1 : 3;
    dist = dc < 0 ? -dc : dc;
  } else {
    throw InvalidAction("move " + move_name(m) + " is not along a row or column");
  }
  return m.from * kActionsPerSquare + dir * kMaxDistance + (dist - 1);
}

ActionMask legal_action_mask(const GameState& s) {
  ActionMask mask;
  for (Move m : legal_moves(s)) mask.set(move_to_action(m));
  return mask;
}

std::vector<int> legal_actions(const GameState& s) {
  std::vector<int> out;
  const auto moves = legal_moves(s);
  out.reserve(moves.size());
  for (Move m : moves) out.push_back(move_to_action(m));
  std::sort(out.begin(), out.end());
  return out;
}

Square rotate_square(Square sq, int k) {
  int r = row_of(sq);
  int c = col_of(sq);
  for (int i = 0; i < normalize_turns(k); ++i) {
    const int nr = kBoardSize - 1 - c;
    c = r;
    r = nr;
  }
  return square_at(r, c);
}

Board rotate_board(const Board& b, int k) {
  Board out;
  b.attackers.for_each([&](Square sq) { out.attackers.set(rotate_square(sq, k)); });
  b.defenders.for_each([&](Square sq) { out.defenders.set(rotate_square(sq, k)); });
  out.king = b.king_alive() ? rotate_square(b.king, k) : kNoSquare;
  return out;
}

PlaneStack rotate_planes(const PlaneStack& p, int k) {
  PlaneStack out;
  for (Square sq = 0; sq < kNumSquares; ++sq) {
    const Square dst = rotate_square(sq, k);
    std::copy_n(p.data.begin() + sq * kNumPlanes, kNumPlanes, out.data.begin() + dst * kNumPlanes);
  }
  return out;
}

int rotate_action(int action, int k) {
  if (action < 0 || action >= kNumActions) throw InvalidAction("action index out of range");
  const Square from = action / kActionsPerSquare;
  const int dir = (action % kActionsPerSquare) / kMaxDistance;
  const int dist_idx = action % kMaxDistance;
  const int turns = normalize_turns(k);
  return rotate_square(from, turns) * kActionsPerSquare + ((dir + 3 * turns) % 4) * kMaxDistance +
         dist_idx;
}

std::vector<float> rotate_policy(std::span<const float> v, int k) {
  if (v.size() != static_cast<std::size_t>(kNumActions))
    throw ContractViolation("policy vector must have 2592 entries");
  std::vector<float> out(kNumActions, 0.0f);
  for (int a = 0; a < kNumActions; ++a) out[rotate_action(a, k)] = v[a];
  return out;
}

ActionMask rotate_mask(const ActionMask& m, int k) {
  ActionMask out;
  for (int a = 0; a < kNumActions; ++a)
    if (m.test(a)) out.set(rotate_action(a, k));
  return out;
}

}  // namespace tablutzero
