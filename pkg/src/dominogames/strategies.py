"""Executable strategies, a game runner and invariant monitors.

Every strategy sees the whole game: ``observe(position, move)`` is called
after each ply (for both players) and ``choose(position)`` when it is the
strategy's turn.  Strategies are deterministic given their observations, so
the verifier can clone them at branch points.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import (PASS, Cell, DominoError, IllegalMove, InputError, Pattern, Place, Position, Region, Sft, Variant,
                   WindowSft, apply_move, ball, initial_position, l1_to_set)
from .reductions import (ArrowAlphabet, BLACK, LEFT, RIGHT, _BaseRules, build_arrow_game, interpret_arrow)
from .words import TurnWord, classify, gap_bound, parse_word, s2_block, v


class Strategy:
    """Base class: override ``choose`` and, when the strategy keeps memory, ``observe``/``reset``."""

    name = "strategy"

    def choose(self, position: Position):
        raise NotImplementedError

    def observe(self, position: Position, move) -> None:
        pass

    def reset(self) -> None:
        pass

    def clone(self) -> "Strategy":
        return copy.deepcopy(self)

    def state_key(self):
        """Hashable summary of private memory, or None when positions alone do not determine play."""
        return None

    def __repr__(self) -> str:
        return f"<{self.name}>"


class PassStrategy(Strategy):
    name = "pass"

    def choose(self, position):
        return PASS

    def state_key(self):
        return ()


class ScriptedStrategy(Strategy):
    """Plays a fixed list of moves, then passes."""

    name = "scripted"

    def __init__(self, moves: Sequence):
        self.moves = list(moves)
        self.i = 0

    def choose(self, position):
        if self.i < len(self.moves):
            move = self.moves[self.i]
            self.i += 1
            return move
        return PASS

    def reset(self):
        self.i = 0


class RandomStrategy(Strategy):
    """Uniform over cells near the tiles (plus a fresh cell) and colours; seeded."""

    name = "random"

    def __init__(self, n_colors: int, seed: int = 0, reach: int = 3, colors: Sequence[int] | None = None,
                 pass_rate: float = 0.0):
        self.n_colors = n_colors
        self.seed = seed
        self.reach = reach
        self.colors = list(colors) if colors is not None else list(range(n_colors))
        self.pass_rate = pass_rate
        self.rng = random.Random(seed)

    def reset(self):
        self.rng = random.Random(self.seed)

    def choose(self, position):
        if position.variant.allows_pass and self.rng.random() < self.pass_rate:
            return PASS
        tiles = sorted(position.pattern)
        d = position.region.dimension
        if not tiles:
            cell = (0,) * d
        else:
            base = self.rng.choice(tiles)
            near = [c for c in ball(base, self.reach) if c not in position.pattern and c in position.region]
            if near:
                cell = self.rng.choice(near)
            else:
                far = max(c[0] for c in tiles) + 1
                cell = (far,) + (0,) * (d - 1)
        return Place(cell, self.rng.choice(self.colors))


class TableStrategy(Strategy):
    """Plays from a solver strategy table; falls back to the first legal box move."""

    name = "table"

    def __init__(self, table):
        self.table = table

    def choose(self, position):
        move = self.table.move_for(position)
        if move is not None:
            return move
        solver = self.table.solver
        state, r = solver.key_of(position)
        succ = solver.successors(state, r)
        return succ[0][0] if succ else PASS

    def state_key(self):
        return ()


# --------------------------------------------------------------------------
# runner


@dataclass(frozen=True)
class InvariantMonitor:
    """A named predicate over (pattern, player to move); ``when`` picks the plies it is checked at."""

    name: str
    predicate: Callable[[Pattern, str], bool]
    when: str = "before-A"  # or "before-B" / "always"

    def applies(self, player: str) -> bool:
        return self.when == "always" or self.when == f"before-{player}"

    def holds(self, pattern: Pattern, player: str) -> bool:
        return bool(self.predicate(pattern, player))


@dataclass
class GameTrace:
    plies: list = field(default_factory=list)  # (Position, move)
    outcome: str = "survived"  # "A-final", "survived", "forfeit"
    final_ply: int | None = None
    forfeit: str | None = None
    witness: object = None
    violations: list = field(default_factory=list)  # (ply, monitor name)
    final_pattern: Pattern = field(default_factory=Pattern)

    @property
    def winner(self) -> str:
        if self.outcome == "A-final":
            return "A"
        if self.outcome == "forfeit":
            return "B" if self.forfeit == "A" else "A"
        return "B"

    @property
    def moves(self) -> list:
        return [m for _, m in self.plies]


def check_move(position: Position, move, n_colors: int) -> None:
    if move is not PASS:
        if not isinstance(move, Place):
            raise IllegalMove(f"not a move: {move!r}")
        if not 0 <= move.color < n_colors:
            raise IllegalMove(f"colour {move.color} outside the alphabet")


def run_game(sft: Sft, strategy_a: Strategy, strategy_b: Strategy, turns="(AB)*", max_plies: int = 100,
             variant: Variant | str = Variant.PASS, monitors: Sequence[InvariantMonitor] = (),
             region: Region | None = None, start_index: int = 0) -> GameTrace:
    """Play the two strategies against each other; an illegal move forfeits the game."""
    pos = initial_position(sft.dimension, turns, region, Variant(variant), start_index)
    strategy_a.reset()
    strategy_b.reset()
    trace = GameTrace()
    k = len(sft.alphabet)
    for ply in range(max_plies):
        player = pos.player
        for mon in monitors:
            if mon.applies(player) and not mon.holds(pos.pattern, player):
                trace.violations.append((ply, mon.name))
        strat = strategy_a if player == "A" else strategy_b
        move = strat.choose(pos)
        try:
            check_move(pos, move, k)
            nxt = apply_move(pos, move)
        except IllegalMove:
            trace.plies.append((pos, move))
            trace.outcome, trace.forfeit, trace.final_ply = "forfeit", player, ply + 1
            trace.final_pattern = pos.pattern
            return trace
        trace.plies.append((pos, move))
        strategy_a.observe(pos, move)
        strategy_b.observe(pos, move)
        pos = nxt
        if move is not PASS:
            w = sft.touching(pos.pattern, move.cell)
            if w is not None:
                trace.outcome, trace.final_ply, trace.witness = "A-final", ply + 1, w
                trace.final_pattern = pos.pattern
                return trace
    player = pos.player
    for mon in monitors:
        if mon.applies(player) and not mon.holds(pos.pattern, player):
            trace.violations.append((max_plies, mon.name))
    trace.final_pattern = pos.pattern
    return trace


# --------------------------------------------------------------------------
# 1D helpers


def _uncoloured_run(pattern: Pattern, start: int, step: int, limit: int | None = None) -> float:
    """Length of the uncoloured run starting at ``start`` going in direction ``step`` (inf if unbounded)."""
    xs = [c[0] for c in pattern]
    if step > 0:
        ahead = [x for x in xs if x >= start]
        return min(ahead) - start if ahead else float("inf")
    behind = [x for x in xs if x <= start]
    return start - max(behind) if behind else float("inf")


def _first_free_right_of_zero(pattern: Pattern) -> int:
    x = 0
    while (x,) in pattern:
        x += 1
    return x


# --------------------------------------------------------------------------
# arrow game strategies


class ABlackStrategy(Strategy):
    """A on the arrow game: black tiles only, left to right from 0, punishing B when it leaves a black uninterpreted.

    Priorities: complete a window around a dead cell; turn an uninterpreted
    tile with one free neighbour into a dead cell; punish (black to the right
    of the last black); otherwise the first free cell right of 0.  A dead
    cell is a coloured cell with both neighbours coloured and no interpretation.
    """

    name = "a-black"

    def __init__(self, game: WindowSft, alphabet: ArrowAlphabet):
        self.game = game
        self.alpha = alphabet
        self.half = (game.window - 3) // 2
        self.reset()

    def reset(self):
        self.last_black: int | None = None
        self.punished = False

    def state_key(self):
        return (self.last_black, self.punished)

    def _empty_cells(self, pattern: Pattern) -> list[int]:
        interp = interpret_arrow(pattern, self.alpha)
        return sorted(c[0] for c in pattern if not interp[c])

    def choose(self, position):
        pattern = position.pattern
        empty = self._empty_cells(pattern)
        for x in empty:
            if (x - 1,) in pattern and (x + 1,) in pattern:
                n = self.half
                for y in range(x - n - 1, x + n + 2):
                    if (y,) not in pattern:
                        return Place((y,), BLACK)
        for x in empty:
            free = [y for y in (x - 1, x + 1) if (y,) not in pattern]
            if len(free) == 1:
                return Place((free[0],), BLACK)
        if self.last_black is not None and self.last_black in empty and (self.last_black + 1,) not in pattern:
            self.punished = True
            return Place((self.last_black + 1,), BLACK)
        return Place((_first_free_right_of_zero(pattern),), BLACK)

    def observe(self, position, move):
        if position.player == "A" and move is not PASS and move.color == BLACK:
            self.last_black = move.cell[0]


def a_black_strategy(game: WindowSft) -> ABlackStrategy:
    construction = getattr(game, "construction", {})
    base = construction.get("base", {}).get("alphabet")
    if construction.get("name") != "arrow" or base is None:
        raise InputError("a_black_strategy needs a game built by build_arrow_game")
    return ABlackStrategy(game, ArrowAlphabet(tuple(base)))


class BParityStrategy(Strategy):
    """B on the arrow game: keep every uncoloured run infinite or even, always pushing the witness colour.

    B only answers the ply right after an A move and passes otherwise.
    """

    name = "b-parity"

    def __init__(self, alphabet: ArrowAlphabet, witness: Sequence[int]):
        self.alpha = alphabet
        self.witness = tuple(witness)
        self.reset()

    def reset(self):
        self.answer_to: int | None = None

    def state_key(self):
        return (self.answer_to,)

    def x(self, i: int) -> int:
        return self.witness[i % len(self.witness)]

    def choose(self, position):
        i = self.answer_to
        if i is None:
            return PASS
        pattern = position.pattern
        right = _uncoloured_run(pattern, i + 1, 1)
        left = _uncoloured_run(pattern, i - 1, -1)
        inf = float("inf")
        if right != inf and right % 2 == 1:
            side = 1
        elif left != inf and left % 2 == 1:
            side = -1
        elif right == inf:
            side = 1
        elif left == inf:
            side = -1
        elif right > 0:  # both sides even and finite: the invariant was already broken
            side = 1
        elif left > 0:
            side = -1
        else:
            return PASS
        j = i + side
        return Place((j,), self.alpha.encode(self.x(j), self.x(i), LEFT if side == 1 else RIGHT))

    def observe(self, position, move):
        if position.player == "A":
            self.answer_to = None if move is PASS else move.cell[0]
        else:
            self.answer_to = None


def b_parity_strategy(game: WindowSft, witness: Sequence[int]) -> BParityStrategy:
    """``witness`` is one period of a periodic configuration of the base SFT."""
    construction = getattr(game, "construction", {})
    desc = construction.get("base")
    if construction.get("name") != "arrow" or desc is None:
        raise InputError("b_parity_strategy needs a game built by build_arrow_game")
    base = Sft(1, desc["alphabet"], [Pattern({tuple(e["offset"]): desc["alphabet"].index(e["color"]) for e in p})
                                     for p in desc["forbidden"]])
    witness = tuple(witness)
    if not witness:
        raise InputError("witness period is empty")
    probe = witness * (3 + base.span() // len(witness) + 1)
    if _BaseRules(base).violates(probe):
        raise InputError(f"witness {witness} is not admissible for the base rules")
    return BParityStrategy(ArrowAlphabet(tuple(desc["alphabet"])), witness)


def parity_holds(pattern: Pattern, player: str = "A") -> bool:
    """Every maximal finite uncoloured run has even length."""
    xs = sorted(c[0] for c in pattern)
    return all((b - a - 1) % 2 == 0 for a, b in zip(xs, xs[1:]))


def no_interpretation_holds(alphabet: ArrowAlphabet) -> Callable[[Pattern, str], bool]:
    def check(pattern: Pattern, player: str = "A") -> bool:
        interp = interpret_arrow(pattern, alphabet)
        return all(not interp[c] for c in interp if c not in pattern)
    return check


def witness_interpretable(alphabet: ArrowAlphabet, witness: Sequence[int]) -> Callable[[Pattern, str], bool]:
    """After B answers, every coloured cell admits the witness colour."""
    def check(pattern: Pattern, player: str = "A") -> bool:
        interp = interpret_arrow(pattern, alphabet)
        return all(witness[c[0] % len(witness)] in interp[c] for c in pattern)
    return check


# --------------------------------------------------------------------------
# isolation strategy


class IsolationStrategy(Strategy):
    """A builds isolated copies of a word, one letter per phase, extending each copy on the right.

    Phase ``l`` (1..n) turns c(k+1)^(n-l+1) copies of ``w[:l-1]`` into at
    least c(k+1)^(n-l) copies of ``w[:l]`` during c(k+1)^(n-l)(2k+1)
    turns.  The whole schedule takes v(n, c, k) turns.
    """

    name = "a-isolation"

    def __init__(self, word: Sequence[int], c: int, delta: int, k: int, dimension: int = 1):
        if c < 1 or delta < 1 or k < 1:
            raise InputError("c, delta and k must be >= 1")
        self.word = tuple(word)
        self.c, self.delta, self.k = c, delta, k
        self.dimension = dimension
        n = len(self.word)
        self.n = n
        self.total = v(n, c, k)
        # isolation needed for copies of w[:l]: delta_n = delta, delta_{l-1} = 2 delta_l + 3
        self.deltas = [0] * (n + 1)
        if n:
            self.deltas[n] = delta
            for l in range(n, 0, -1):
                self.deltas[l - 1] = 2 * self.deltas[l] + 3
        self.phases = []
        start = 0
        for l in range(1, n + 1):
            length = c * (k + 1) ** (n - l) * (2 * k + 1)
            self.phases.append((start, start + length, l))
            start += length
        self.reset()

    def reset(self):
        self.turn = 0
        self.anchors: list[int] | None = None
        self.built: dict[int, int] = {}  # anchor -> letters placed so far

    def state_key(self):
        return self.turn, tuple(sorted(self.built.items())) if self.anchors is not None else None

    @property
    def done(self) -> bool:
        return self.turn >= self.total

    def phase(self) -> int | None:
        for start, end, l in self.phases:
            if start <= self.turn < end:
                return l
        return None

    def spacing(self) -> int:
        return max(self.deltas[0], 2 * self.n) + self.n + 1

    def _place_anchors(self, pattern: Pattern) -> None:
        count = self.c * (self.k + 1) ** self.n
        gap = self.spacing()
        far = max((c[0] for c in pattern), default=0) + gap
        self.anchors = [far + j * gap for j in range(count)]
        self.built = {a: 0 for a in self.anchors}

    def cell(self, x: int) -> Cell:
        return (x,) + (0,) * (self.dimension - 1)

    def _intact(self, pattern: Pattern, anchor: int, length: int) -> bool:
        return all(pattern.get(self.cell(anchor + j)) == self.word[j] for j in range(length))

    def isolated(self, pattern: Pattern, anchor: int, length: int, delta: int) -> bool:
        own = {self.cell(anchor + j) for j in range(length)}
        others = [c for c in pattern if c not in own]
        return all(l1_to_set(c, others) > delta for c in own) if own else True

    def choose(self, position):
        if self.n == 0 or self.done:
            return PASS
        pattern = position.pattern
        if self.anchors is None:
            self._place_anchors(pattern)
        l = self.phase()
        target = l - 1
        ready = [a for a in self.anchors if self.built[a] == target and self._intact(pattern, a, target)
                 and self.cell(a + target) not in pattern]
        ready.sort(key=lambda a: (not self.isolated(pattern, a, target, self.deltas[target]), a))
        if not ready:
            return PASS
        return Place(self.cell(ready[0] + target), self.word[target])

    def observe(self, position, move):
        if self.anchors is None and position.player == "A" and self.n and not self.done:
            self._place_anchors(position.pattern)
        if position.player == "A" and move is not PASS and self.anchors is not None:
            for a in self.anchors:
                if self.cell(a + self.built[a]) == move.cell and self.built[a] < self.n:
                    self.built[a] += 1
        self.turn += 1

    def isolated_copies(self, pattern: Pattern, delta: int | None = None) -> int:
        delta = self.delta if delta is None else delta
        if self.n == 0:
            return self.c
        if self.anchors is None:
            return 0
        return sum(1 for a in self.anchors if self._intact(pattern, a, self.n) and self.isolated(pattern, a, self.n, delta))


def a_isolation_strategy(word: Sequence[int], c: int, delta: int, turns, k: int | None = None,
                         dimension: int = 1, scan_depth: int = 200) -> IsolationStrategy:
    """Isolation strategy for turn words with a bounded gap between AA factors."""
    w = turns if isinstance(turns, TurnWord) else parse_word(turns)
    s = w.prefix(scan_depth)
    if s.count("AA") == 0 or len([i for i in range(len(s) - 1) if s[i:i + 2] == "AA"]) < 2:
        raise InputError(f"turn word {w} has fewer than two AA factors in {scan_depth} letters")
    gap = gap_bound(w, "AA", scan_depth)
    if k is None:
        k = gap
    elif k < gap:
        raise InputError(f"k={k} is below the observed AA gap bound {gap}")
    return IsolationStrategy(word, c, delta, k, dimension)


# --------------------------------------------------------------------------
# marking game F2


def _word_at(pattern: Pattern, x: int, word: str, names=("a", "b")) -> bool:
    return all(pattern.get((x + j,)) == names.index(ch) for j, ch in enumerate(word))


class BFourRuleStrategy(Strategy):
    """B on the F2 marking game; B always plays b (colour 1)."""

    name = "b-four-rule"
    A_, B_ = 0, 1

    def state_key(self):
        return ()

    def choose(self, position):
        pattern = position.pattern
        xs = sorted(c[0] for c in pattern)
        # 1: next to an a
        cand = sorted({x + d for x in xs if pattern[(x,)] == self.A_ for d in (-1, 1)} - set(xs))
        if cand:
            return Place((cand[0],), self.B_)
        # 2: left of baba
        cand = sorted(x - 1 for x in xs if _word_at(pattern, x, "baba") and (x - 1,) not in pattern)
        if cand:
            return Place((cand[0],), self.B_)
        # 3: right of b(ba)^n b, n in {3, 4}
        cand = []
        for n in (3, 4):
            w = "b" + "ba" * n + "b"
            cand += [x + len(w) for x in xs if _word_at(pattern, x, w) and (x + len(w),) not in pattern]
        if cand:
            return Place((min(cand),), self.B_)
        return PASS


def b_four_rule_strategy() -> BFourRuleStrategy:
    return BFourRuleStrategy()


def _occurrences_1d(pattern: Pattern, word: str) -> list[int]:
    return [c[0] for c in pattern if _word_at(pattern, c[0], word)]


def four_rule_invariant_1(pattern: Pattern, player: str = "A") -> bool:
    """Every a sits inside bab."""
    return all(_word_at(pattern, x - 1, "bab") for x in _occurrences_1d(pattern, "a"))


_COVERS = ["bbaba"] + ["b" + "ba" * n + "bb" for n in (3, 4)]


def four_rule_invariant_2(pattern: Pattern, player: str = "A") -> bool:
    """Every aba sits inside bbaba or b(ba)^n bb, n in {3, 4}."""
    for j in _occurrences_1d(pattern, "aba"):
        ok = False
        for w in _COVERS:
            for s in range(j + 3 - len(w), j + 1):
                if _word_at(pattern, s, w):
                    ok = True
                    break
            if ok:
                break
        if not ok:
            return False
    return True


# --------------------------------------------------------------------------
# palindrome games


def palindrome_game(n: int) -> Sft:
    """Colours 0..n; forbidden: palindromes of length 2n+1 and every iii."""
    import itertools

    if n < 1:
        raise InputError("n must be >= 1")
    k = n + 1
    words = set()
    for half in itertools.product(range(k), repeat=n + 1):
        words.add(half + half[-2::-1])
    for i in range(k):
        words.add((i, i, i))
    return Sft(1, [str(i) for i in range(k)], [Pattern.from_word(w) for w in sorted(words)])


class APalindromeStrategy(Strategy):
    """A in the no-pass palindrome game: mirror B around 0, or build aaa when B plays away from the tiles."""

    name = "a-palindrome"

    def __init__(self, n: int):
        self.n = n
        self.reset()

    def reset(self):
        self.last_b = None
        self.pending: tuple[int, int, int] | None = None  # (k, step, colour): tiles at k and k+step
        self.off_script = False

    def state_key(self):
        return (self.last_b, self.pending, self.off_script)

    def _fallback(self, pattern):
        self.off_script = True
        return Place((_first_free_right_of_zero(pattern),), 0)

    def choose(self, position):
        pattern = position.pattern
        if not pattern:
            return Place((0,), 0)
        if self.pending is not None:
            k, step, a = self.pending
            self.pending = None
            for x in (k - step, k + 2 * step):
                if (x,) not in pattern:
                    return Place((x,), a)
            return self._fallback(pattern)
        if self.last_b is None:
            return self._fallback(pattern)
        (k,), a = self.last_b
        if k == 0:
            return self._fallback(pattern)
        step = 1 if k > 0 else -1
        if (k - step,) in pattern:
            if (-k,) in pattern:
                return self._fallback(pattern)
            return Place((-k,), a)
        if (k + step,) in pattern:
            return self._fallback(pattern)
        self.pending = (k, step, a)
        return Place((k + step,), a)

    def observe(self, position, move):
        if position.player == "B":
            self.last_b = None if move is PASS else (move.cell, move.color)


def a_palindrome_strategy(n: int) -> APalindromeStrategy:
    if n < 1:
        raise InputError("n must be >= 1")
    return APalindromeStrategy(n)


# --------------------------------------------------------------------------
# the 1234 game under the s2 turn word


def live_windows(pattern: Pattern, target: Sequence[int] = (1, 2, 3, 4)) -> dict[int, int]:
    """Start cell -> tile count for every window that can still be coloured as ``target`` and holds a tile."""
    width = len(target)
    starts = {c[0] - j for c in pattern for j in range(width)}
    out = {}
    for s in sorted(starts):
        count = 0
        for j in range(width):
            a = pattern.get((s + j,))
            if a is None:
                continue
            if a != target[j]:
                break
            count += 1
        else:
            if count:
                out[s] = count
    return out


def window_profile(pattern: Pattern) -> tuple[int, ...]:
    """Counts of live windows with 4, 3, 2 and 1 tiles."""
    counts = list(live_windows(pattern).values())
    return tuple(counts.count(t) for t in (4, 3, 2, 1))


class B1234Strategy(Strategy):
    """B for forbidden 1234 under s2: greedy search keeping live windows small.

    At each B turn B picks the move minimising (windows with 4, 3, 2, 1
    tiles), first in cell-then-colour order on ties, passing when nothing
    helps.  After the last B move of block n the live windows should number
    at most n with one tile each; failures are recorded, not raised.
    """

    name = "b-1234"

    def __init__(self):
        self.reset()

    def reset(self):
        self.failures: list[tuple[int, tuple[int, ...]]] = []

    def choose(self, position):
        pattern = position.pattern
        best_key = window_profile(pattern)
        best = PASS
        cells = sorted({(s + j,) for s in live_windows(pattern) for j in range(4)} - set(pattern))
        for cell in cells:
            for a in range(5):
                key = window_profile(pattern.with_tile(cell, a))
                if key < best_key:
                    best_key, best = key, Place(cell, a)
        return best

    def observe(self, position, move):
        i = position.ply
        if position.player == "B" and position.turn.word.letter(i + 1) == "A" and s2_block(i + 1) != s2_block(i):
            after = position.pattern if move is PASS else position.pattern.with_tile(move.cell, move.color)
            prof = window_profile(after)
            block = s2_block(i)
            if prof[0] or prof[1] or prof[2] or prof[3] > block:
                self.failures.append((i, prof))


def b_1234_invariant_strategy() -> B1234Strategy:
    return B1234Strategy()


def game_1234() -> Sft:
    return Sft(1, [str(i) for i in range(5)], [Pattern.from_word([1, 2, 3, 4])])


def invariant_1234(block_of: Callable[[int], int] = s2_block) -> Callable[[Pattern, int], bool]:
    """Block-boundary check: no live window with two or more tiles, at most ``block`` with one."""
    def check(pattern: Pattern, block: int) -> bool:
        prof = window_profile(pattern)
        return not (prof[0] or prof[1] or prof[2]) and prof[3] <= block
    return check


class Greedy1234Attacker(Strategy):
    """A playing 1, 2, 3, 4 left to right, restarting further right whenever a window is spoilt."""

    name = "a-greedy-1234"

    def __init__(self):
        self.reset()

    def reset(self):
        self.start = 0

    def choose(self, position):
        pattern = position.pattern
        while True:
            for j in range(4):
                a = pattern.get((self.start + j,))
                if a is None:
                    return Place((self.start + j,), j + 1)
                if a != j + 1:
                    break
            self.start += 5


def _arrow_alphabet(sft) -> ArrowAlphabet:
    base = getattr(sft, "construction", {}).get("base")
    if base is None:
        raise InputError("this strategy needs a game built by build_arrow_game")
    return ArrowAlphabet(tuple(base["alphabet"]))


def _ints(value) -> list[int]:
    if isinstance(value, str):
        return [int(x) for x in value.replace(",", " ").split()]
    return [int(x) for x in value]


NAMED = {
    "pass": lambda sft, **kw: PassStrategy(),
    "random": lambda sft, seed=0, reach=3, pass_rate=0.0, **kw: RandomStrategy(
        len(sft.alphabet), int(seed), int(reach), pass_rate=float(pass_rate)),
    "black": lambda sft, **kw: a_black_strategy(sft),
    "parity": lambda sft, witness="0", **kw: b_parity_strategy(sft, _ints(witness)),
    "isolation": lambda sft, word="0", c=1, delta=1, turns="(AAB)*", **kw: a_isolation_strategy(
        _ints(word), int(c), int(delta), turns, dimension=sft.dimension),
    "four-rule": lambda sft, **kw: b_four_rule_strategy(),
    "palindrome": lambda sft, n=1, **kw: a_palindrome_strategy(int(n)),
    "b1234": lambda sft, **kw: b_1234_invariant_strategy(),
    "greedy1234": lambda sft, **kw: Greedy1234Attacker(),
}


def named_strategy(name: str, sft=None, **params) -> Strategy:
    if name not in NAMED:
        raise InputError(f"unknown strategy {name!r}; choose from {sorted(NAMED)}")
    if sft is None:
        sft = Sft(1, ["0"], [])
    try:
        return NAMED[name](sft, **params)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad parameters for strategy {name!r}: {exc}") from None


def named_monitor(name: str, sft=None, witness=None, when: str | None = None) -> InvariantMonitor:
    """Monitors by name: four-rule-1, four-rule-2, parity, no-interpretation, witness."""
    if name == "four-rule-1":
        return InvariantMonitor(name, four_rule_invariant_1, when or "before-A")
    if name == "four-rule-2":
        return InvariantMonitor(name, four_rule_invariant_2, when or "before-A")
    if name == "parity":
        return InvariantMonitor(name, parity_holds, when or "before-A")
    if name == "no-interpretation":
        return InvariantMonitor(name, no_interpretation_holds(_arrow_alphabet(sft)), when or "before-B")
    if name == "witness":
        return InvariantMonitor(name, witness_interpretable(_arrow_alphabet(sft), _ints(witness or "0")),
                                when or "before-A")
    raise InputError(f"unknown monitor {name!r}; choose from four-rule-1, four-rule-2, parity, "
                     "no-interpretation, witness")
