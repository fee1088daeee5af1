"""Bounded-horizon solving through the multi-board game.

In the multi-board game every board is a separate pattern with its own
origin.  At ply ``t`` (counted from 0) a player may pass, open a new board
with a single tile at its origin, or add a tile to an existing board within
L1 distance ``2**(T - t)`` of that board's support.  A wins when some board
contains a forbidden pattern before ply ``T``.

Because forbidden patterns are connected, play on the infinite grid that
lasts at most ``T`` plies maps onto this game: moves close to existing tiles
extend a board, far moves open one.  ``theta`` performs that mapping and
checks it; ``reconstruct_strategy`` goes the other way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import (PASS, Cell, DominoError, InputError, Pattern, Place, Sft, Unsupported, Variant, add, ball, l1_to_set,
                   sub)
from .solver_finite import BudgetExceeded
from .words import EventuallyPeriodic, TurnCursor, TurnWord


class ThetaInconsistency(DominoError, AssertionError):
    """The trace mapping broke one of its invariants; this indicates a bug."""


class OpenBoard(NamedTuple):
    color: int


class BoardPlace(NamedTuple):
    board: int
    cell: Cell
    color: int


@dataclass(frozen=True)
class MultiBoardPosition:
    boards: tuple[Pattern, ...]
    t: int
    T: int
    turn: TurnCursor

    @property
    def player(self) -> str:
        return self.turn.player

    def radius(self) -> int:
        return 2 ** (self.T - self.t)


def threshold(T: int, t: int) -> int:
    return 2 ** (T - t)


def omega_legal_moves(pos: MultiBoardPosition, n_colors: int, variant: Variant | str = Variant.PASS) -> list:
    """Pass (when allowed), then placements board by board, then board openings."""
    if pos.t >= pos.T:
        return []
    out: list = [PASS] if Variant(variant).allows_pass else []
    r = pos.radius()
    for k, board in enumerate(pos.boards):
        for cell in _near_cells(board, r):
            out.extend(BoardPlace(k, cell, a) for a in range(n_colors))
    out.extend(OpenBoard(a) for a in range(n_colors))
    return out


def _near_cells(board: Pattern, r: int) -> list[Cell]:
    cells = set()
    for c in board:
        cells.update(ball(c, r))
    return sorted(cells - board.support())


def _canonical(board: Pattern) -> tuple:
    return board.normalized().items_sorted


@dataclass
class OmegaResult:
    a_wins: bool
    T: int
    nodes: int
    memo_hits: int
    principal_line: list = field(default_factory=list)
    final_boards: tuple = ()
    extension: bool = False

    @property
    def winner(self) -> str:
        return "A" if self.a_wins else "B"

    def record(self) -> dict:
        return {
            "winner": self.winner,
            "T": self.T,
            "nodes": self.nodes,
            "memo_hits": self.memo_hits,
            "boards": ";".join(_board_text(b) for b in self.final_boards) or "-",
            "value_extension": str(self.extension).lower(),
        }


def _board_text(board: Pattern) -> str:
    return " ".join(f"{','.join(map(str, c))}:{a}" for c, a in board.items_sorted)


class OmegaSolver:
    """Memoized minimax for the multi-board game with horizon ``T``."""

    def __init__(self, sft: Sft, T: int, turns="(AB)*", variant: Variant | str = Variant.PASS,
                 start_index: int = 0, node_limit: int | None = None):
        if T < 0:
            raise InputError("T must be >= 0")
        if not sft.alphabet:
            raise InputError("alphabet is empty")
        if not sft.all_connected():
            raise InputError("bounded solving assumes every forbidden pattern is connected "
                             "(L1 adjacency); split or pad the disconnected pattern")
        self.sft = sft
        self.T = T
        self.variant = Variant(variant)
        raw = turns if isinstance(turns, TurnWord) else TurnWord.parse(turns)
        try:
            self.word: EventuallyPeriodic = raw.finite_state()
        except Unsupported:
            raise Unsupported(f"turn word {raw} is not finite-state") from None
        self.start_index = start_index
        self.node_limit = node_limit
        self.k = len(sft.alphabet)
        self.origin = (0,) * sft.dimension
        self.min_size = sft.min_pattern_size()
        self.memo: dict = {}
        self.nodes = 0
        self.memo_hits = 0

    def initial(self) -> MultiBoardPosition:
        return MultiBoardPosition((), 0, self.T, TurnCursor(self.word, self.start_index))

    # -- transitions ------------------------------------------------------

    def alive(self, board: Pattern, remaining: int) -> bool:
        """A board that cannot reach the smallest forbidden size in time never matters again."""
        return len(board) + remaining >= self.min_size

    def actions(self, pos: MultiBoardPosition, reduced: bool = False) -> list:
        """Legal actions; ``reduced`` keeps one representative of the moves on dead boards."""
        if not reduced:
            return omega_legal_moves(pos, self.k, self.variant)
        if pos.t >= pos.T:
            return []
        remaining = pos.T - pos.t
        out: list = [PASS] if self.variant.allows_pass else []
        r = pos.radius()
        dead = None
        for k, board in enumerate(pos.boards):
            if not self.alive(board, remaining):
                if dead is None:
                    dead = BoardPlace(k, _near_cells(board, 1)[0], 0)
                continue
            for cell in _near_cells(board, r):
                out.extend(BoardPlace(k, cell, a) for a in range(self.k))
        if dead is not None:
            out.append(dead)
        out.extend(OpenBoard(a) for a in range(self.k))
        return out

    def step(self, pos: MultiBoardPosition, action) -> tuple[MultiBoardPosition, bool]:
        """Successor and whether it is final (only the touched board can become final)."""
        if isinstance(action, OpenBoard):
            board = Pattern({self.origin: action.color})
            nxt = MultiBoardPosition(pos.boards + (board,), pos.t + 1, pos.T, pos.turn.advance())
            return nxt, self.sft.touching(board, self.origin) is not None
        if isinstance(action, BoardPlace):
            board = pos.boards[action.board].with_tile(action.cell, action.color)
            boards = pos.boards[:action.board] + (board,) + pos.boards[action.board + 1:]
            nxt = MultiBoardPosition(boards, pos.t + 1, pos.T, pos.turn.advance())
            return nxt, self.sft.touching(board, action.cell) is not None
        return MultiBoardPosition(pos.boards, pos.t + 1, pos.T, pos.turn.advance()), False

    def key(self, pos: MultiBoardPosition) -> tuple:
        remaining = pos.T - pos.t
        boards = tuple(sorted(_canonical(b) for b in pos.boards if self.alive(b, remaining)))
        return boards, pos.t, self.word.residue(pos.turn.index)

    # -- evaluation -------------------------------------------------------

    def wins(self, pos: MultiBoardPosition) -> bool:
        """Whether A forces a final board from the (non-final) position."""
        remaining = pos.T - pos.t
        if remaining <= 0 or self.min_size == 0:
            return False
        largest = max((len(b) for b in pos.boards), default=0)
        if max(largest, 0) + remaining < self.min_size:
            return False
        key = self.key(pos)
        got = self.memo.get(key)
        if got is not None:
            self.memo_hits += 1
            return got
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise BudgetExceeded(self.nodes)
        is_a = pos.player == "A"
        if remaining == 1:
            result = self._last_ply(pos, is_a)
            self.memo[key] = result
            return result
        result = not is_a
        any_move = False
        for action in self.actions(pos, reduced=True):
            any_move = True
            nxt, final = self.step(pos, action)
            w = final or self.wins(nxt)
            if is_a and w:
                result = True
                break
            if not is_a and not w:
                result = False
                break
        if not any_move:
            result = False
        self.memo[key] = result
        return result

    def _last_ply(self, pos: MultiBoardPosition, is_a: bool) -> bool:
        if not is_a:
            if self.variant.allows_pass:
                return False
            return all(self.step(pos, a)[1] for a in self.actions(pos, reduced=True))
        if any(self.sft.touching(Pattern({self.origin: a}), self.origin) for a in range(self.k)):
            return True
        return any(self._completable(b) for b in pos.boards)

    def _completable(self, board: Pattern) -> bool:
        """Some single tile next to ``board`` completes a forbidden pattern."""
        get = board.get
        for shape in self.sft.shapes:
            for v in {sub(c, s) for c in board for s in shape.cells}:
                missing = None
                cols = []
                for s in shape.cells:
                    cell = add(s, v)
                    a = get(cell)
                    if a is None:
                        if missing is not None:
                            break
                        missing = len(cols)
                    cols.append(a)
                else:
                    if missing is None:
                        continue
                    for a in range(self.k):
                        cols[missing] = a
                        if shape.match(tuple(cols)) is not None:
                            return True
        return False

    def choose(self, pos: MultiBoardPosition):
        """A's first winning action, or B's first action that keeps A from winning.

        A losing mover gets its first legal action; None only when no action exists.
        """
        is_a = pos.player == "A"
        acts = self.actions(pos)
        for action in acts:
            nxt, final = self.step(pos, action)
            w = final or self.wins(nxt)
            if w == is_a:
                return action
        return acts[0] if acts else None

    def solve(self) -> OmegaResult:
        pos = self.initial()
        a_wins = self.wins(pos)
        line: list = []
        final_boards: tuple = ()
        if a_wins:
            line, final_boards = self._principal(pos)
        ext = self.word.period not in ("AB", "BA") or bool(self.word.prefix_word and self.word.prefix_word != "B")
        return OmegaResult(a_wins, self.T, self.nodes, self.memo_hits, line, final_boards, ext)

    def _principal(self, pos):
        line = []
        while pos.t < pos.T:
            action = self.choose(pos)
            line.append(action)
            pos, final = self.step(pos, action)
            if final:
                return line, pos.boards
        raise DominoError("principal line did not reach a final position")


def solve_omega(sft: Sft, T: int, turns="(AB)*", variant: Variant | str = Variant.PASS,
                start_index: int = 0, node_limit: int | None = None) -> OmegaResult:
    return OmegaSolver(sft, T, turns, variant, start_index, node_limit).solve()


def smallest_horizon(sft: Sft, turns="(AB)*", variant: Variant | str = Variant.PASS, T_max: int = 6,
                     start_index: int = 0, node_limit: int | None = None) -> int | None:
    for T in range(T_max + 1):
        if solve_omega(sft, T, turns, variant, start_index, node_limit).a_wins:
            return T
    return None


# --------------------------------------------------------------------------
# trace mapping


@dataclass
class AnchoredTrace:
    """Board snapshots of a mapped trace: ``snapshots[t]`` is the state after ``t`` moves."""

    T: int
    snapshots: list = field(default_factory=list)  # list of (boards, anchors)
    actions: list = field(default_factory=list)

    @property
    def boards(self) -> tuple[Pattern, ...]:
        return self.snapshots[-1][0]

    @property
    def anchors(self) -> tuple[Cell, ...]:
        return self.snapshots[-1][1]

    def flat(self, t: int | None = None) -> Pattern:
        boards, anchors = self.snapshots[-1 if t is None else t]
        out = {}
        for b, z in zip(boards, anchors):
            for c, a in b.items():
                out[add(c, z)] = a
        return Pattern(out)


class ThetaMapper:
    """Incremental version of ``theta``: feed grid moves one at a time."""

    def __init__(self, T: int):
        self.T = T
        self.t = 0
        self.boards: list[Pattern] = []
        self.anchors: list[Cell] = []
        self.trace = AnchoredTrace(T, [((), ())])

    def locate(self, cell: Cell) -> int | None:
        r = threshold(self.T, self.t)
        near = [k for k, (b, z) in enumerate(zip(self.boards, self.anchors)) if l1_to_set(sub(cell, z), b) <= r]
        if len(near) > 1:
            raise ThetaInconsistency(f"cell {cell} is within {r} of boards {near} at ply {self.t}")
        return near[0] if near else None

    def push(self, move):
        if self.t >= self.T:
            raise InputError(f"trace longer than the horizon {self.T}")
        if move is PASS:
            action = PASS
        else:
            k = self.locate(move.cell)
            if k is None:
                self.boards.append(Pattern({tuple(0 for _ in move.cell): move.color}))
                self.anchors.append(move.cell)
                action = OpenBoard(move.color)
            else:
                local = sub(move.cell, self.anchors[k])
                if local in self.boards[k]:
                    raise InputError(f"cell {move.cell} is already coloured")
                self.boards[k] = self.boards[k].with_tile(local, move.color)
                action = BoardPlace(k, local, move.color)
        self.t += 1
        self.trace.snapshots.append((tuple(self.boards), tuple(self.anchors)))
        self.trace.actions.append(action)
        return action


def separation(boards, anchors) -> float:
    """Smallest L1 distance between tiles of two different boards (inf with < 2 boards)."""
    placed = [[add(c, z) for c in b] for b, z in zip(boards, anchors)]
    best = math.inf
    for i in range(len(placed)):
        for j in range(i + 1, len(placed)):
            for c in placed[i]:
                best = min(best, l1_to_set(c, placed[j]))
    return best


def check_invariants(flat: Pattern, trace: AnchoredTrace, t: int) -> None:
    """Support equality, colour agreement and separation after ``t`` moves."""
    boards, anchors = trace.snapshots[t]
    union = {}
    for b, z in zip(boards, anchors):
        for c, a in b.items():
            g = add(c, z)
            if g in union:
                raise ThetaInconsistency(f"cell {g} lies on two boards")
            union[g] = a
    if set(union) != set(flat.support()):
        raise ThetaInconsistency(f"supports differ after {t} moves")
    for g, a in union.items():
        if flat[g] != a:
            raise ThetaInconsistency(f"colour mismatch at {g} after {t} moves")
    # boards end up more than 2**(T-t+1) apart, which is more than the 2**(T-t) needed for uniqueness
    if separation(boards, anchors) <= threshold(trace.T, t) * 2 and t > 0:
        raise ThetaInconsistency(f"boards closer than {2 * threshold(trace.T, t)} after {t} moves")


def theta(trace, T: int) -> AnchoredTrace:
    """Map a grid trace ``[(pattern_before, move), ...]`` onto boards, checking the invariants."""
    if len(trace) > T:
        raise InputError(f"trace of length {len(trace)} exceeds horizon {T}")
    mapper = ThetaMapper(T)
    for t, (before, move) in enumerate(trace):
        check_invariants(Pattern(before), mapper.trace, t)
        if move is not PASS and move.cell in before:
            raise InputError(f"move {move} targets a coloured cell")
        mapper.push(move)
    if trace:
        last, move = trace[-1]
        after = Pattern(last) if move is PASS else Pattern(last).with_tile(move.cell, move.color)
        check_invariants(after, mapper.trace, len(trace))
    return mapper.trace


# --------------------------------------------------------------------------
# strategy reconstruction


class ReconstructedStrategy:
    """A grid strategy for A driven by a multi-board strategy.

    ``observe`` must see every move (both players) so the board mapping stays
    in sync; ``choose`` translates the board action back to the grid.
    """

    def __init__(self, solver: OmegaSolver, omega_choose=None):
        self.solver = solver
        self.T = solver.T
        self.omega_choose = omega_choose or solver.choose
        self.reset()

    def reset(self) -> None:
        self.mapper = ThetaMapper(self.T)
        self.pos = self.solver.initial()
        self.tiles: dict[Cell, int] = {}

    def fresh_anchor(self) -> Cell:
        d = self.solver.sft.dimension
        step = 2 ** (self.T + 2)
        j = len(self.mapper.boards) + 1
        reach = max((c[0] for c in self.tiles), default=-math.inf)
        while step * j - 2 ** (self.T + 1) <= reach:
            j += 1
        return (step * j,) + (0,) * (d - 1)

    def choose(self, position=None):
        if self.pos.t >= self.T:
            return PASS
        action = self.omega_choose(self.pos)
        if action is None or action is PASS:
            return PASS
        if isinstance(action, OpenBoard):
            return Place(self.fresh_anchor(), action.color)
        return Place(add(action.cell, self.mapper.anchors[action.board]), action.color)

    def observe(self, position, move) -> None:
        if self.pos.t >= self.T:
            return
        if move is not PASS:
            self.tiles[move.cell] = move.color
        action = self.mapper.push(move)
        # boards opened by the mapper use the origin as their first cell, like the solver's
        self.pos, _ = self.solver.step(self.pos, action)


def reconstruct_strategy(omega: OmegaSolver | Sft, T: int | None = None, turns="(AB)*",
                         variant: Variant | str = Variant.PASS) -> ReconstructedStrategy:
    solver = omega if isinstance(omega, OmegaSolver) else OmegaSolver(omega, T, turns, variant)
    if T is not None and T != solver.T:
        raise InputError("T differs from the solver's horizon")
    return ReconstructedStrategy(solver)
