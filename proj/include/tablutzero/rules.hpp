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

// Tablut on a 9x9 board: 16 attackers against 8 defenders and a king.
//
// Squares are indexed row-major, 0..80. Row 0 is the top edge in the
// renderer; "north" means decreasing row. The throne is square 40 and the
// corners are 0, 8, 72 and 80.
//
// Rules implemented here:
//   * pieces slide like rooks and cannot jump;
//   * only the king may stop on the throne or a corner; other pieces may pass
//     over an empty throne;
//   * custodial capture against an enemy piece or a hostile square, triggered
//     only by the moving side (moving into a sandwich is safe);
//   * the king is captured like any other piece and takes part in captures;
//   * corners are hostile to everyone, the throne is hostile to attackers and
//     to defenders while the king is not on it;
//   * 100 plies without capture or 512 plies in total is a draw;
//   * the player whose move produces the third occurrence of a position
//     (including side to move) loses;
//   * a player with no legal move loses.

#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tablutzero {

inline constexpr int kBoardSize = 9;
inline constexpr int kNumSquares = kBoardSize * kBoardSize;
inline constexpr int kThrone = 40;
inline constexpr std::array<int, 4> kCorners = {0, 8, 72, 80};
inline constexpr int kNoSquare = -1;

inline constexpr int kNoCaptureDrawPlies = 100;
inline constexpr int kMaxPlies = 512;
inline constexpr int kRepetitionLoss = 3;
inline constexpr int kHistorySteps = 8;

using Square = int;

constexpr int row_of(Square sq) { return sq / kBoardSize; }
constexpr int col_of(Square sq) { return sq % kBoardSize; }
constexpr Square square_at(int row, int col) { return row * kBoardSize + col; }
constexpr bool on_board(int row, int col) {
  return row >= 0 && row < kBoardSize && col >= 0 && col < kBoardSize;
}
constexpr bool is_corner(Square sq) {
  return sq == 0 || sq == 8 || sq == 72 || sq == 80;
}
constexpr bool is_throne(Square sq) { return sq == kThrone; }
constexpr bool is_restricted(Square sq) { return is_corner(sq) || is_throne(sq); }

// Algebraic name, file a..i for columns 0..8 and rank 1..9 for rows 0..8.
std::string square_name(Square sq);
std::optional<Square> parse_square(std::string_view text);

enum class Side : std::uint8_t { kAttacker = 0, kDefender = 1 };

constexpr Side opponent(Side s) {
  return s == Side::kAttacker ? Side::kDefender : Side::kAttacker;
}
std::string_view side_name(Side s);

// Set of squares; 81 bits packed into a 128-bit word.
class Bitboard {
 public:
  constexpr Bitboard() = default;

  static constexpr Bitboard single(Square sq) {
    Bitboard b;
    b.bits_ = Word{1} << sq;
    return b;
  }

  constexpr bool test(Square sq) const { return (bits_ >> sq) & 1; }
  constexpr void set(Square sq) { bits_ |= Word{1} << sq; }
  constexpr void clear(Square sq) { bits_ &= ~(Word{1} << sq); }
  constexpr bool empty() const { return bits_ == 0; }
  int count() const {
    return std::popcount(static_cast<std::uint64_t>(bits_)) +
           std::popcount(static_cast<std::uint64_t>(bits_ >> 64));
  }

  // Calls fn(square) for every member in increasing order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    auto lo = static_cast<std::uint64_t>(bits_);
    while (lo != 0) {
      fn(std::countr_zero(lo));
      lo &= lo - 1;
    }
    auto hi = static_cast<std::uint64_t>(bits_ >> 64);
    while (hi != 0) {
      fn(64 + std::countr_zero(hi));
      hi &= hi - 1;
    }
  }

  constexpr Bitboard operator|(Bitboard o) const { return from_word(bits_ | o.bits_); }
  constexpr Bitboard operator&(Bitboard o) const { return from_word(bits_ & o.bits_); }
  constexpr bool operator==(const Bitboard&) const = default;

 private:
  using Word = unsigned __int128;
  static constexpr Bitboard from_word(Word w) {
    Bitboard b;
    b.bits_ = w;
    return b;
  }
  Word bits_ = 0;
};

enum class Piece : std::uint8_t { kEmpty, kAttacker, kDefender, kKing };

struct Board {
  Bitboard attackers;
  Bitboard defenders;  // taflmen only, the king is tracked separately
  Square king = kNoSquare;

  Piece at(Square sq) const;
  bool occupied(Square sq) const { return at(sq) != Piece::kEmpty; }
  Bitboard occupancy() const;
  bool king_alive() const { return king != kNoSquare; }
  int piece_count() const;  // all pieces including the king

  // Pieces belonging to `side`, the king counted for the defender.
  bool owned_by(Square sq, Side side) const;

  bool operator==(const Board&) const = default;
};

// Throws ContractViolation when a structural invariant is broken.
void validate_board(const Board& b);

struct Move {
  Square from = 0;
  Square to = 0;

  auto operator<=>(const Move&) const = default;
};

std::string move_name(Move m);
std::optional<Move> parse_move(std::string_view text);  // "e3-e5"

enum class Result : std::uint8_t { kAttackerWin, kDefenderWin, kDraw };
enum class OutcomeReason : std::uint8_t {
  kKingCaptured,
  kKingEscaped,
  kNoMoves,
  kThirdRepetition,
  kHalfmoveDraw,
  kMaxPlyDraw,
};

struct Outcome {
  Result result;
  OutcomeReason reason;

  bool operator==(const Outcome&) const = default;
};

std::string_view result_name(Result r);
std::string_view reason_name(OutcomeReason r);
std::optional<Result> parse_result(std::string_view text);
std::optional<OutcomeReason> parse_reason(std::string_view text);

// Winner as seen by `side`: +1 win, -1 loss, 0 draw.
int outcome_value_for(const Outcome& o, Side side);

// A past position as remembered by a state for history encoding.
struct PositionSnapshot {
  Board board;
  int repetitions = 1;  // occurrences of the position when it was reached
};

// Immutable game position plus the clocks and repetition memory the rules
// need. Build with initial() or from_board(), advance with apply_move().
class GameState {
 public:
  static GameState initial();

  // A custom position with fresh clocks and an empty history. Runs the
  // terminal checks that make sense without a previous move (captured king,
  // escaped king, side to move without legal moves).
  static GameState from_board(const Board& board, Side to_move, int ply = 0,
                              int halfmove_clock = 0);

  const Board& board() const { return board_; }
  Side to_move() const { return to_move_; }
  int ply() const { return ply_; }
  int halfmove_clock() const { return halfmove_clock_; }
  const std::optional<Outcome>& outcome() const { return outcome_; }
  bool is_terminal() const { return outcome_.has_value(); }
  std::uint64_t key() const { return key_; }

  // Occurrences of `key` in this game so far. Positions before the most
  // recent capture cannot recur, so only that stretch is remembered.
  int repetition_count(std::uint64_t key) const;
  int repetitions() const { return repetition_count(key_); }

  // Up to kHistorySteps - 1 earlier positions, most recent first.
  std::span<const PositionSnapshot> history() const {
    return {history_.data(), static_cast<std::size_t>(history_len_)};
  }

  PositionSnapshot snapshot() const { return {board_, repetitions()}; }

 private:
  friend GameState apply_move(const GameState& s, Move m);
  friend GameState apply_move_unchecked(const GameState& s, Move m);

  Board board_;
  Side to_move_ = Side::kAttacker;
  int ply_ = 0;
  int halfmove_clock_ = 0;
  std::optional<Outcome> outcome_;
  std::uint64_t key_ = 0;
  std::vector<std::uint64_t> keys_since_capture_;
  std::array<PositionSnapshot, kHistorySteps - 1> history_{};
  int history_len_ = 0;
};

Board initial_board();

bool is_hostile(Square sq, Side victim_side, const Board& b);

// Sorted by (from, to). Throws ContractViolation on a terminal state.
std::vector<Move> legal_moves(const GameState& s);
// Same generator on a raw board, without the terminal precondition.
std::vector<Move> legal_moves(const Board& b, Side side);
bool has_legal_move(const Board& b, Side side);
bool is_legal(const GameState& s, Move m);

// Squares whose pieces are removed when `mover` plays `m` on `b` (m already
// applied to the board). At most three.
std::vector<Square> resolve_captures(const Board& after_move, Side mover, Square to);

// Throws ContractViolation unless m is legal in s.
GameState apply_move(const GameState& s, Move m);
// Skips the legality check; for callers that drew m from legal_moves().
GameState apply_move_unchecked(const GameState& s, Move m);

std::uint64_t position_key(const Board& b, Side to_move);
inline std::uint64_t position_key(const GameState& s) { return s.key(); }

inline const std::optional<Outcome>& outcome(const GameState& s) { return s.outcome(); }

// Counts leaf nodes of the legal-move tree to `depth`, stopping at terminals.
std::uint64_t perft(const GameState& s, int depth);

// Text diagram: A attacker, D defender, K king, · empty, × empty throne,
// ⊕ empty corner.
std::string render_board(const Board& b);

}  // namespace tablutzero
