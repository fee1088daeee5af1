"""Exact solving of Domino games on boxes [-n, n]^d.

A position is a colouring of the box plus a residue of the (finite-state)
turn word.  Tiles are never removed, so the only cycles in the position graph
are pass cycles: for a fixed pattern, passing walks the residues along a
lasso.  Each lasso is solved as a small least fixpoint once the placement
children (strictly larger patterns) are known.  Positions outside A's
attractor are B-wins, which covers infinite passing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .core import PASS, Cell, InputError, Pattern, Place, Position, Region, Sft, Unsupported, Variant, add, sub
from .words import EventuallyPeriodic, TurnWord

INF = math.inf


class BudgetExceeded(Exception):
    def __init__(self, nodes: int):
        super().__init__(f"node budget exhausted after {nodes} nodes")
        self.nodes = nodes


@dataclass
class SolveResult:
    winner: str
    value: float  # plies A needs under optimal play; inf iff B wins
    principal_line: list = field(default_factory=list)
    nodes: int = 0
    memo_hits: int = 0
    radius: int | None = None
    exact: bool = True
    extension: bool = False  # value under a non-alternating turn word

    def record(self) -> dict:
        return {
            "winner": self.winner,
            "value": "inf" if self.value == INF else (int(self.value) if self.exact else "n/a"),
            "n": self.radius,
            "nodes": self.nodes,
            "memo_hits": self.memo_hits,
            "value_extension": str(self.extension).lower(),
        }


def _to_word(turns) -> EventuallyPeriodic:
    if isinstance(turns, str):
        turns = TurnWord.parse(turns)
    return turns.finite_state()


class RegionSolver:
    """Memoized solver for one (sft, box, variant, turn word) instance."""

    def __init__(self, sft: Sft, radius: int, variant: Variant | str = Variant.PASS, turns="(AB)*",
                 start_index: int = 0, exact: bool = True, node_limit: int | None = None):
        if not sft.alphabet:
            raise InputError("alphabet is empty")
        if radius < 0:
            raise InputError("radius must be >= 0")
        self.sft = sft
        self.radius = radius
        self.region = Region(sft.dimension, radius)
        self.variant = Variant(variant)
        self.raw_turns = turns if isinstance(turns, TurnWord) else TurnWord.parse(turns)
        try:
            self.word = _to_word(self.raw_turns)
        except Unsupported:
            raise Unsupported(f"turn word {self.raw_turns} is not finite-state") from None
        self.start_index = start_index
        self.exact = exact
        self.node_limit = node_limit
        self.cells: list[Cell] = sorted(self.region.cells())
        self.index = {c: i for i, c in enumerate(self.cells)}
        self.k = len(sft.alphabet)
        self._threats = self._build_threats()
        self.memo: dict[tuple[tuple[int, ...], int], float] = {}
        self.nodes = 0
        self.memo_hits = 0

    # -- instance geometry ------------------------------------------------

    def _build_threats(self) -> list[list[tuple[tuple[int, ...], object]]]:
        """For each cell: forbidden placements (cell indices, matcher) inside the box containing it."""
        out: list[list] = [[] for _ in self.cells]
        for shape in self.sft.shapes:
            seen = set()
            for cell in self.cells:
                for anchor in shape.cells:
                    v = sub(cell, anchor)
                    if v in seen:
                        continue
                    seen.add(v)
                    placed = [add(s, v) for s in shape.cells]
                    if all(c in self.index for c in placed):
                        idxs = tuple(self.index[c] for c in placed)
                        for i in idxs:
                            out[i].append((idxs, shape.match))
        return out

    def _final_after(self, state: tuple[int, ...], i: int) -> bool:
        for idxs, match in self._threats[i]:
            cols = tuple(state[j] for j in idxs)
            if -1 not in cols and match(cols) is not None:
                return True
        return False

    def initial_key(self) -> tuple[tuple[int, ...], int]:
        return (-1,) * len(self.cells), self.word.residue(self.start_index)

    def key_of(self, position: Position) -> tuple[tuple[int, ...], int]:
        state = [-1] * len(self.cells)
        for c, a in position.pattern.items():
            state[self.index[c]] = a
        return tuple(state), self.word.residue(position.turn.index)

    def pattern_of(self, state: tuple[int, ...]) -> Pattern:
        return Pattern({self.cells[i]: a for i, a in enumerate(state) if a >= 0})

    def children(self, state: tuple[int, ...]) -> Iterator[tuple[Place, tuple[int, ...], bool]]:
        """Placement successors in cell-then-colour order: (move, state', final?)."""
        for i, cur in enumerate(state):
            if cur != -1:
                continue
            for a in range(self.k):
                child = state[:i] + (a,) + state[i + 1:]
                yield Place(self.cells[i], a), child, self._final_after(child, i)

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise BudgetExceeded(self.nodes)

    # -- evaluation ----------------------------------------------------------

    def value(self, state: tuple[int, ...], r: int) -> float:
        """Value of a non-final position; INF means B wins.  Boolean mode returns 0/INF-ish (1 or INF)."""
        key = (state, r)
        got = self.memo.get(key)
        if got is not None:
            self.memo_hits += 1
            return got
        if -1 not in state:
            self.memo[key] = INF
            return INF
        if self.variant.allows_pass:
            self._solve_lasso(state, r)
            return self.memo[key]
        self._tick()
        val = self._placement_value(state, r)
        self.memo[key] = val
        return val

    def _placement_value(self, state, r) -> float:
        """1 + (min for A / max for B) over placement children."""
        is_a = self.word.player_at(r) == "A"
        nr = self.word.next_residue(r)
        best = INF if is_a else -1
        for _move, child, final in self.children(state):
            cv = 0 if final else self.value(child, nr)
            if is_a:
                if cv < best:
                    best = cv
                    if not self.exact or best == 0:
                        break
            else:
                if cv > best:
                    best = cv
                    if best == INF:
                        break
        if best == -1:
            return INF
        return best + 1

    def _solve_lasso(self, state, r) -> None:
        order = []
        pos = {}
        cur = r
        while cur not in pos:
            if (state, cur) in self.memo:
                break
            pos[cur] = len(order)
            order.append(cur)
            cur = self.word.next_residue(cur)
        for res in order:
            self._tick()
        place = {res: self._placement_value(state, res) for res in order}
        vals = {res: INF for res in order}

        def get(res):
            if res in vals:
                return vals[res]
            return self.memo[(state, res)]

        changed = True
        while changed:
            changed = False
            for res in reversed(order):
                nxt = get(self.word.next_residue(res))
                if self.word.player_at(res) == "A":
                    new = min(place[res], nxt + 1)
                else:
                    new = max(place[res], nxt + 1)
                if new < vals[res]:
                    vals[res] = new
                    changed = True
        for res in order:
            self.memo[(state, res)] = vals[res]

    def successors(self, state, r):
        """All moves from a non-final position with successor values, in enumeration order."""
        nr = self.word.next_residue(r)
        out = []
        if self.variant.allows_pass:
            out.append((PASS, state, False, self.value(state, nr)))
        for move, child, final in self.children(state):
            out.append((move, child, final, 0 if final else self.value(child, nr)))
        return out

    def solve(self) -> SolveResult:
        state, r = self.initial_key()
        # no forbidden placement fits in the box: nothing to search
        val = self.value(state, r) if any(self._threats) else INF
        winner = "A" if val < INF else "B"
        line = self.principal_line() if (winner == "A" and self.exact) else []
        ext = self.word.period not in ("AB", "BA")
        return SolveResult(winner, val, line, self.nodes, self.memo_hits, self.radius, self.exact, ext)

    def principal_line(self) -> list:
        state, r = self.initial_key()
        line = []
        val = self.value(state, r)
        while val not in (0, INF):
            succ = self.successors(state, r)
            if self.word.player_at(r) == "A":
                move, child, final, cv = min(succ, key=lambda s: s[3])
            else:
                move, child, final, cv = max(succ, key=lambda s: s[3])
            line.append(move)
            state, r, val = child, self.word.next_residue(r), cv
        return line

    # -- strategies ----------------------------------------------------------

    def winner_at(self, state, r) -> str:
        return "A" if self.value(state, r) < INF else "B"

    def choose(self, state, r):
        """Deterministic choice: lowest-value successor for A, first B-win-preserving one for B."""
        succ = self.successors(state, r)
        if self.word.player_at(r) == "A":
            move, child, final, cv = min(succ, key=lambda s: s[3])
            return move if cv < INF else None
        for move, child, final, cv in succ:
            if cv == INF:
                return move
        return None

    def extract_strategy(self, player: str) -> "StrategyTable":
        if not self.exact:
            raise InputError("strategy extraction needs an exact solver")
        table: dict = {}
        start = self.initial_key()
        seen = {start}
        todo = [start]
        while todo:
            state, r = todo.pop()
            if -1 not in state:
                continue
            nr = self.word.next_residue(r)
            mover = self.word.player_at(r)
            succ = self.successors(state, r)
            if mover == player and self.winner_at(state, r) == player:
                move = self.choose(state, r)
                table[(state, r)] = move
                succ = [s for s in succ if s[0] == move]
            for move, child, final, _cv in succ:
                if final:
                    continue
                key = (child, nr)
                if key not in seen:
                    seen.add(key)
                    todo.append(key)
        return StrategyTable(self, player, table)


@dataclass
class StrategyTable:
    solver: RegionSolver
    player: str
    table: dict

    def __len__(self) -> int:
        return len(self.table)

    def move_for(self, position: Position):
        return self.table.get(self.solver.key_of(position))

    def items(self):
        for (state, r), move in sorted(self.table.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            yield (self.solver.pattern_of(state), r), move


def solve_region(sft: Sft, box_radius: int, variant: Variant | str = Variant.PASS, turns="(AB)*",
                 start_index: int = 0, exact: bool = True, node_limit: int | None = None) -> SolveResult:
    return RegionSolver(sft, box_radius, variant, turns, start_index, exact, node_limit).solve()


def extract_strategy(sft: Sft, box_radius: int, variant, turns, player: str, start_index: int = 0) -> StrategyTable:
    return RegionSolver(sft, box_radius, variant, turns, start_index).extract_strategy(player)


def semidecide_A_wins(sft: Sft, variant=Variant.PASS, turns="(AB)*", n_max: int = 3,
                      start_index: int = 0, node_limit: int | None = None) -> int | None:
    """Smallest n <= n_max such that A wins on [-n, n]^d, else None (inconclusive).

    Only meaningful as a certificate for the whole grid when passing is
    allowed: there, B moves outside the box are as good as passes.
    """
    for n in range(n_max + 1):
        res = solve_region(sft, n, variant, turns, start_index, exact=False, node_limit=node_limit)
        if res.winner == "A":
            return n
    return None


def play_out(solver: RegionSolver, a_table: StrategyTable, b_table: StrategyTable, max_plies: int = 10_000):
    """Table-vs-table self play from the initial position; a side without an entry plays its first legal move."""
    state, r = solver.initial_key()
    for ply in range(max_plies):
        if -1 not in state:
            return "B", ply
        mover = solver.word.player_at(r)
        table = a_table if mover == "A" else b_table
        move = table.table.get((state, r))
        if move is None:
            move = solver.successors(state, r)[0][0]
        if move is PASS:
            child, final = state, False
        else:
            i = solver.index[move.cell]
            child = state[:i] + (move.color,) + state[i + 1:]
            final = solver._final_after(child, i)
        if final:
            return "A", ply + 1
        state, r = child, solver.word.next_residue(r)
    return "B", max_plies
