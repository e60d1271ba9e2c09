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

// Network-facing views of a game: the input plane stack, the 2592-way action
// space and the quarter-turn rotation group acting on both.
//
// Plane layout (9x9 squares, 43 planes, stored square-major: data[sq * 43 + p]):
//   planes 5t..5t+4 for history step t = 0..7, most recent first:
//     5t+0  friendly taflmen (side to move at the current step)
//     5t+1  enemy taflmen
//     5t+2  king
//     5t+3  all ones if the position had occurred before (count >= 2)
//     5t+4  all ones if the position had occurred twice before (count >= 3)
//   plane 40  all ones when the attacker is to move
//   plane 41  min(ply / 512, 1)
//   plane 42  min(halfmove_clock / 100, 1)
// Missing history steps are zero.
//
// Action layout: index = from * 32 + direction * 8 + (distance - 1) with
// directions N=0 (decreasing row), E=1, S=2, W=3 and distance 1..8.

#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <vector>

#include "tablutzero/rules.hpp"

namespace tablutzero {

inline constexpr int kPlanesPerStep = 5;
inline constexpr int kNumPlanes = kHistorySteps * kPlanesPerStep + 3;
inline constexpr int kColorPlane = 40;
inline constexpr int kMoveCountPlane = 41;
inline constexpr int kHalfmovePlane = 42;
inline constexpr int kPlaneStackSize = kNumSquares * kNumPlanes;

inline constexpr int kNumDirections = 4;
inline constexpr int kMaxDistance = 8;
inline constexpr int kActionsPerSquare = kNumDirections * kMaxDistance;
inline constexpr int kNumActions = kNumSquares * kActionsPerSquare;

static_assert(kNumPlanes == 43);
static_assert(kNumActions == 2592);

struct PlaneStack {
  std::array<float, kPlaneStackSize> data{};

  float at(Square sq, int plane) const { return data[sq * kNumPlanes + plane]; }
  float& at(Square sq, int plane) { return data[sq * kNumPlanes + plane]; }
  bool operator==(const PlaneStack&) const = default;
};

// Up to eight consecutive positions of one game, most recent first, with the
// clocks of the most recent one.
struct HistoryWindow {
  std::vector<PositionSnapshot> steps;
  Side to_move = Side::kAttacker;
  int ply = 0;
  int halfmove_clock = 0;

  static HistoryWindow from_state(const GameState& s);
  // `states` most recent first; each entry one move after the next.
  static HistoryWindow from_states(std::span<const GameState> states);
};

PlaneStack encode_state(const HistoryWindow& h);
PlaneStack encode_state(const GameState& s);
// Writes kPlaneStackSize floats.
void encode_state_into(const GameState& s, std::span<float> out);

using ActionMask = std::bitset<kNumActions>;

// Throws InvalidAction when the move is not a straight on-board slide.
int move_to_action(Move m);
// Throws InvalidAction for indices out of range or landing off the board.
Move action_to_move(int action);
std::optional<Move> try_action_to_move(int action);

// Legal moves as a mask over action indices. Throws ContractViolation on a
// terminal state.
ActionMask legal_action_mask(const GameState& s);
std::vector<int> legal_actions(const GameState& s);

// Quarter turns counter-clockwise on the rendered board: (r, c) -> (8 - c, r).
Square rotate_square(Square sq, int k);
Board rotate_board(const Board& b, int k);
PlaneStack rotate_planes(const PlaneStack& p, int k);
int rotate_action(int action, int k);
// out[rotate_action(a, k)] = v[a]
std::vector<float> rotate_policy(std::span<const float> v, int k);
ActionMask rotate_mask(const ActionMask& m, int k);

}  // namespace tablutzero
