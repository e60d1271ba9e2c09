# Copyright 2026 The TablutZero Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Independent reference for frozen test values.

Brute-force Tablut move generation and capture resolution written directly from
the rule list, without bitboards. Used once to compute the constants that the
C++ tests assert (perft counts, decodable action count).

    python3 tests/oracles/tablut_oracle.py
"""

N = 9
THRONE = (4, 4)
CORNERS = {(0, 0), (0, 8), (8, 0), (8, 8)}


def initial():
    board = {}
    for k in (1, 2):
        for rc in ((4 - k, 4), (4 + k, 4), (4, 4 - k), (4, 4 + k)):
            board[rc] = "D"
    for i in (3, 4, 5):
        for rc in ((0, i), (8, i), (i, 0), (i, 8)):
            board[rc] = "A"
    for rc in ((1, 4), (7, 4), (4, 1), (4, 7)):
        board[rc] = "A"
    board[THRONE] = "K"
    return board


def owner(piece):
    return None if piece is None else ("A" if piece == "A" else "D")


def moves(board, side):
    out = []
    for fr in [(r, c) for r in range(N) for c in range(N)]:
        p = board.get(fr)
        if owner(p) != side:
            continue
        for to in [(r, c) for r in range(N) for c in range(N)]:
            if to == fr or (to[0] != fr[0] and to[1] != fr[1]):
                continue
            if to in board:
                continue
            if (to == THRONE or to in CORNERS) and p != "K":
                continue
            if to[0] == fr[0]:
                lo, hi = sorted((fr[1], to[1]))
                between = [(fr[0], c) for c in range(lo + 1, hi)]
            else:
                lo, hi = sorted((fr[0], to[0]))
                between = [(r, fr[1]) for r in range(lo + 1, hi)]
            if any(sq in board for sq in between):
                continue
            out.append((fr, to))
    return out


def hostile(sq, victim_side, board):
    if sq in CORNERS:
        return True
    if sq == THRONE:
        return victim_side == "A" or board.get(THRONE) != "K"
    return False


def apply(board, side, mv):
    fr, to = mv
    b = dict(board)
    b[to] = b.pop(fr)
    victims = []
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        v = (to[0] + dr, to[1] + dc)
        f = (to[0] + 2 * dr, to[1] + 2 * dc)
        if not (0 <= f[0] < N and 0 <= f[1] < N):
            continue
        if owner(b.get(v)) is None or owner(b.get(v)) == side:
            continue
        if owner(b.get(f)) == side or hostile(f, owner(b.get(v)), b):
            victims.append(v)
    for v in victims:
        del b[v]
    return b, bool(victims)


def terminal(board, side_to_move):
    if "K" not in board.values():
        return True
    k = [sq for sq, p in board.items() if p == "K"][0]
    if k in CORNERS:
        return True
    return not moves(board, side_to_move)


def perft(board, side, depth):
    if depth == 0:
        return 1
    ms = moves(board, side)
    if depth == 1:
        return len(ms)
    other = "D" if side == "A" else "A"
    total = 0
    for mv in ms:
        b, _ = apply(board, side, mv)
        # Repetition and clock draws cannot trigger within three plies.
        if terminal(b, other):
            continue
        total += perft(b, other, depth - 1)
    return total


def decodable_actions():
    count = 0
    for sq in range(81):
        r, c = divmod(sq, 9)
        for dr, dc in ((-1, 0), (0, 1), (1, 0), (0, -1)):
            for dist in range(1, 9):
                if 0 <= r + dr * dist < N and 0 <= c + dc * dist < N:
                    count += 1
    return count


if __name__ == "__main__":
    b = initial()
    print("initial attacker moves", len(moves(b, "A")))
    for d in (1, 2, 3):
        print("perft", d, perft(b, "A", d))
    print("decodable actions", decodable_actions())
