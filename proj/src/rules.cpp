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

#include "tablutzero/rules.hpp"

#include <algorithm>
#include <utility>

#include "tablutzero/errors.hpp"

namespace tablutzero {
namespace {

constexpr std::array<int, 4> kRowStep = {-1, 0, 1, 0};  // N E S W
constexpr std::array<int, 4> kColStep = {0, 1, 0, -1};

// Zobrist tables from splitmix64 seeded with kZobristSeed. Changing the seed
// changes every position key, and with it the repetition bookkeeping of saved
// games, so it is fixed.
constexpr std::uint64_t kZobristSeed = 0x7AB1'0700'5EED'0001ULL;

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct ZobristTables {
  std::array<std::uint64_t, kNumSquares> attacker{};
  std::array<std::uint64_t, kNumSquares> defender{};
  std::array<std::uint64_t, kNumSquares + 1> king{};  // last slot: no king
  std::uint64_t defender_to_move = 0;
};

constexpr ZobristTables make_zobrist() {
  ZobristTables t;
  std::uint64_t state = kZobristSeed;
  for (auto& v : t.attacker) v = splitmix64(state);
  for (auto& v : t.defender) v = splitmix64(state);
  for (auto& v : t.king) v = splitmix64(state);
  t.defender_to_move = splitmix64(state);
  return t;
}

constexpr ZobristTables kZobrist = make_zobrist();

bool stop_allowed(const Board& b, Square from, Square to) {
  return !is_restricted(to) || b.king == from;
}

template <typename Fn>
void for_each_move(const Board& b, Side side, Fn&& fn) {
  const Bitboard occ = b.occupancy();
  auto slide = [&](Square from) {
    const int r0 = row_of(from);
    const int c0 = col_of(from);
    for (int d = 0; d < 4; ++d) {
      int r = r0 + kRowStep[d];
      int c = c0 + kColStep[d];
      while (on_board(r, c)) {
        const Square to = square_at(r, c);
        if (occ.test(to)) break;
        if (stop_allowed(b, from, to)) {
          if (fn(Move{from, to})) return true;
        }
        r += kRowStep[d];
        c += kColStep[d];
      }
    }
    return false;
  };
  if (side == Side::kAttacker) {
    bool stop = false;
    b.attackers.for_each([&](Square sq) {
      if (!stop) stop = slide(sq);
    });
  } else {
    // The king slots into ascending order among the defenders.
    bool stop = false;
    Bitboard pieces = b.defenders;
    if (b.king_alive()) pieces.set(b.king);
    pieces.for_each([&](Square sq) {
      if (!stop) stop = slide(sq);
    });
  }
}

}  // namespace

std::string square_name(Square sq) {
  std::string s;
  s += static_cast<char>('a' + col_of(sq));
  s += static_cast<char>('1' + row_of(sq));
  return s;
}

std::optional<Square> parse_square(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  const char f = static_cast<char>(text[0] | 0x20);
  const char r = text[1];
  if (f < 'a' || f > 'i' || r < '1' || r > '9') return std::nullopt;
  return square_at(r - '1', f - 'a');
}

std::string_view side_name(Side s) {
  return s == Side::kAttacker ? "attacker" : "defender";
}

Piece Board::at(Square sq) const {
  if (sq == king) return Piece::kKing;
  if (attackers.test(sq)) return Piece::kAttacker;
  if (defenders.test(sq)) return Piece::kDefender;
  return Piece::kEmpty;
}

Bitboard Board::occupancy() const {
  Bitboard occ = attackers | defenders;
  if (king_alive()) occ.set(king);
  return occ;
}

int Board::piece_count() const {
  return attackers.count() + defenders.count() + (king_alive() ? 1 : 0);
}

bool Board::owned_by(Square sq, Side side) const {
  if (side == Side::kAttacker) return attackers.test(sq);
  return defenders.test(sq) || sq == king;
}

void validate_board(const Board& b) {
  if (!(b.attackers & b.defenders).empty())
    throw ContractViolation("attacker and defender sets overlap");
  if (b.king != kNoSquare) {
    if (b.king < 0 || b.king >= kNumSquares) throw ContractViolation("king off board");
    if (b.attackers.test(b.king) || b.defenders.test(b.king))
      throw ContractViolation("king shares a square with a taflman");
  }
  if (b.attackers.count() > 16) throw ContractViolation("more than 16 attackers");
  if (b.defenders.count() > 8) throw ContractViolation("more than 8 defenders");
  for (Square sq : {0, 8, 40, 72, 80}) {
    if (b.attackers.test(sq) || b.defenders.test(sq))
      throw ContractViolation("taflman on throne or corner " + square_name(sq));
  }
}

std::string move_name(Move m) { return square_name(m.from) + "-" + square_name(m.to); }

std::optional<Move> parse_move(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  auto from = parse_square(text.substr(0, dash));
  auto to = parse_square(text.substr(dash + 1));
  if (!from || !to) return std::nullopt;
  return Move{*from, *to};
}

std::string_view result_name(Result r) {
  switch (r) {
    case Result::kAttackerWin: return "AttackerWin";
    case Result::kDefenderWin: return "DefenderWin";
    case Result::kDraw: return "Draw";
  }
  return "?";
}

std::string_view reason_name(OutcomeReason r) {
  switch (r) {
    case OutcomeReason::kKingCaptured: return "KingCaptured";
    case OutcomeReason::kKingEscaped: return "KingEscaped";
    case OutcomeReason::kNoMoves: return "NoMoves";
    case OutcomeReason::kThirdRepetition: return "ThirdRepetition";
    case OutcomeReason::kHalfmoveDraw: return "HalfmoveDraw";
    case OutcomeReason::kMaxPlyDraw: return "MaxPlyDraw";
  }
  return "?";
}

std::optional<Result> parse_result(std::string_view text) {
  for (Result r : {Result::kAttackerWin, Result::kDefenderWin, Result::kDraw})
    if (result_name(r) == text) return r;
  return std::nullopt;
}

std::optional<OutcomeReason> parse_reason(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(OutcomeReason::kMaxPlyDraw); ++i) {
    auto r = static_cast<OutcomeReason>(i);
    if (reason_name(r) == text) return r;
  }
  return std::nullopt;
}

int outcome_value_for(const Outcome& o, Side side) {
  if (o.result == Result::kDraw) return 0;
  const Side winner = o.result == Result::kAttackerWin ? Side::kAttacker : Side::kDefender;
  return winner == side ? 1 : -1;
}

Board initial_board() {
  Board b;
  b.king = kThrone;
  for (int k : {1, 2}) {
    b.defenders.set(square_at(4 - k, 4));
    b.defenders.set(square_at(4 + k, 4));
    b.defenders.set(square_at(4, 4 - k));
    b.defenders.set(square_at(4, 4 + k));
  }
  for (int i : {3, 4, 5}) {
    b.attackers.set(square_at(0, i));
    b.attackers.set(square_at(8, i));
    b.attackers.set(square_at(i, 0));
    b.attackers.set(square_at(i, 8));
  }
  b.attackers.set(square_at(1, 4));
  b.attackers.set(square_at(7, 4));
  b.attackers.set(square_at(4, 1));
  b.attackers.set(square_at(4, 7));
  return b;
}

std::uint64_t position_key(const Board& b, Side to_move) {
  std::uint64_t k = 0;
  b.attackers.for_each([&](Square sq) { k ^= kZobrist.attacker[sq]; });
  b.defenders.for_each([&](Square sq) { k ^= kZobrist.defender[sq]; });
  k ^= kZobrist.king[b.king_alive() ? b.king : kNumSquares];
  if (to_move == Side::kDefender) k ^= kZobrist.defender_to_move;
  return k;
}

bool is_hostile(Square sq, Side victim_side, const Board& b) {
  if (is_corner(sq)) return true;
  if (is_throne(sq)) return victim_side == Side::kAttacker || b.king != kThrone;
  return false;
}

std::vector<Move> legal_moves(const Board& b, Side side) {
  std::vector<Move> moves;
  moves.reserve(128);
  for_each_move(b, side, [&](Move m) {
    moves.push_back(m);
    return false;
  });
  std::sort(moves.begin(), moves.end());
  return moves;
}

std::vector<Move> legal_moves(const GameState& s) {
  if (s.is_terminal()) throw ContractViolation("legal_moves on a terminal state");
  return legal_moves(s.board(), s.to_move());
}

bool has_legal_move(const Board& b, Side side) {
  bool found = false;
  for_each_move(b, side, [&](Move) {
    found = true;
    return true;
  });
  return found;
}

bool is_legal(const GameState& s, Move m) {
  if (s.is_terminal()) return false;
  const Board& b = s.board();
  if (m.from < 0 || m.from >= kNumSquares || m.to < 0 || m.to >= kNumSquares) return false;
  if (m.from == m.to || !b.owned_by(m.from, s.to_move())) return false;
  const int dr = row_of(m.to) - row_of(m.from);
  const int dc = col_of(m.to) - col_of(m.from);
  if (dr != 0 && dc != 0) return false;
  if (!stop_allowed(b, m.from, m.to)) return false;
  const int step = (dr > 0 ? kBoardSize : dr < 0 ? -kBoardSize : 0) + (dc > 0 ? 1 : dc < 0 ? -1 : 0);
  for (Square sq = m.from + step;; sq += step) {
    if (b.occupied(sq)) return false;
    if (sq == m.to) break;
  }
  return true;
}

std::vector<Square> resolve_captures(const Board& b, Side mover, Square to) {
  std::vector<Square> captured;
  const Side victim_side = opponent(mover);
  const int r0 = row_of(to);
  const int c0 = col_of(to);
  for (int d = 0; d < 4; ++d) {
    const int r1 = r0 + kRowStep[d], c1 = c0 + kColStep[d];
    const int r2 = r1 + kRowStep[d], c2 = c1 + kColStep[d];
    if (!on_board(r2, c2)) continue;
    const Square victim = square_at(r1, c1);
    const Square anvil = square_at(r2, c2);
    if (!b.owned_by(victim, victim_side)) continue;
    if (b.owned_by(anvil, mover) || is_hostile(anvil, victim_side, b)) {
      captured.push_back(victim);
    }
  }
  return captured;
}

int GameState::repetition_count(std::uint64_t key) const {
  return static_cast<int>(std::count(keys_since_capture_.begin(), keys_since_capture_.end(), key));
}

GameState GameState::initial() { return from_board(initial_board(), Side::kAttacker); }

GameState GameState::from_board(const Board& board, Side to_move, int ply, int halfmove_clock) {
  validate_board(board);
  if (ply < 0 || halfmove_clock < 0 || halfmove_clock > ply)
    throw ContractViolation("inconsistent clocks");
  GameState s;
  s.board_ = board;
  s.to_move_ = to_move;
  s.ply_ = ply;
  s.halfmove_clock_ = halfmove_clock;
  s.key_ = position_key(board, to_move);
  s.keys_since_capture_.push_back(s.key_);
  if (!board.king_alive()) {
    s.outcome_ = Outcome{Result::kAttackerWin, OutcomeReason::kKingCaptured};
  } else if (is_corner(board.king)) {
    s.outcome_ = Outcome{Result::kDefenderWin, OutcomeReason::kKingEscaped};
  } else if (halfmove_clock >= kNoCaptureDrawPlies) {
    s.outcome_ = Outcome{Result::kDraw, OutcomeReason::kHalfmoveDraw};
  } else if (ply >= kMaxPlies) {
    s.outcome_ = Outcome{Result::kDraw, OutcomeReason::kMaxPlyDraw};
  } else if (!has_legal_move(board, to_move)) {
    s.outcome_ = Outcome{to_move == Side::kAttacker ? Result::kDefenderWin : Result::kAttackerWin,
                         OutcomeReason::kNoMoves};
  }
  return s;
}

GameState apply_move(const GameState& s, Move m) {
  if (!is_legal(s, m)) throw ContractViolation("illegal move " + move_name(m));
  return apply_move_unchecked(s, m);
}

GameState apply_move_unchecked(const GameState& s, Move m) {
  const Side mover = s.to_move_;
  GameState n;
  n.board_ = s.board_;
  Board& b = n.board_;
  if (b.king == m.from) {
    b.king = m.to;
  } else if (mover == Side::kAttacker) {
    b.attackers.clear(m.from);
    b.attackers.set(m.to);
  } else {
    b.defenders.clear(m.from);
    b.defenders.set(m.to);
  }

  const std::vector<Square> captured = resolve_captures(b, mover, m.to);
  for (Square sq : captured) {
    if (sq == b.king) {
      b.king = kNoSquare;
    } else if (mover == Side::kAttacker) {
      b.defenders.clear(sq);
    } else {
      b.attackers.clear(sq);
    }
  }

  n.to_move_ = opponent(mover);
  n.ply_ = s.ply_ + 1;
  n.halfmove_clock_ = captured.empty() ? s.halfmove_clock_ + 1 : 0;
  n.key_ = position_key(b, n.to_move_);
  if (captured.empty()) {
    n.keys_since_capture_.reserve(s.keys_since_capture_.size() + 1);
    n.keys_since_capture_ = s.keys_since_capture_;
  }
  n.keys_since_capture_.push_back(n.key_);

  n.history_[0] = s.snapshot();
  for (int i = 1; i < static_cast<int>(n.history_.size()) && i <= s.history_len_; ++i) {
    n.history_[i] = s.history_[i - 1];
  }
  n.history_len_ = std::min<int>(s.history_len_ + 1, static_cast<int>(n.history_.size()));

  const Result mover_loses = mover == Side::kAttacker ? Result::kDefenderWin : Result::kAttackerWin;
  const Result opponent_loses =
      mover == Side::kAttacker ? Result::kAttackerWin : Result::kDefenderWin;
  if (!b.king_alive()) {
    n.outcome_ = Outcome{Result::kAttackerWin, OutcomeReason::kKingCaptured};
  } else if (is_corner(b.king)) {
    n.outcome_ = Outcome{Result::kDefenderWin, OutcomeReason::kKingEscaped};
  } else if (n.repetitions() >= kRepetitionLoss) {
    n.outcome_ = Outcome{mover_loses, OutcomeReason::kThirdRepetition};
  } else if (n.halfmove_clock_ >= kNoCaptureDrawPlies) {
    n.outcome_ = Outcome{Result::kDraw, OutcomeReason::kHalfmoveDraw};
  } else if (n.ply_ >= kMaxPlies) {
    n.outcome_ = Outcome{Result::kDraw, OutcomeReason::kMaxPlyDraw};
  } else if (!has_legal_move(b, n.to_move_)) {
    n.outcome_ = Outcome{opponent_loses, OutcomeReason::kNoMoves};
  }
  return n;
}

std::uint64_t perft(const GameState& s, int depth) {
  if (depth == 0) return 1;
  if (s.is_terminal()) return 0;
  const auto moves = legal_moves(s);
  if (depth == 1) return moves.size();
  std::uint64_t total = 0;
  for (Move m : moves) total += perft(apply_move_unchecked(s, m), depth - 1);
  return total;
}

std::string render_board(const Board& b) {
  std::string out = "   a b c d e f g h i\n";
  for (int r = 0; r < kBoardSize; ++r) {
    out += std::to_string(r + 1);
    out += "  ";
    for (int c = 0; c < kBoardSize; ++c) {
      const Square sq = square_at(r, c);
      switch (b.at(sq)) {
        case Piece::kAttacker: out += "A"; break;
        case Piece::kDefender: out += "D"; break;
        case Piece::kKing: out += "K"; break;
        case Piece::kEmpty:
          out += is_throne(sq) ? "×" : is_corner(sq) ? "⊕" : "·";
          break;
      }
      if (c + 1 < kBoardSize) out += ' ';
    }
    out += '\n';
  }
  return out;
}

}  // namespace tablutzero
