"""Interpretation-based reductions between 1D SFTs, marking games and a 1D emptiness test.

A derived game is played over a richer alphabet; each derived pattern is
read back as a set of candidate base colourings (its interpretations).  A
derived window is forbidden when none of its interpretations is admissible
for the base SFT, so A wins the derived game exactly when A can force a
region whose every reading violates the base rules.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from math import comb
from typing import Mapping, Sequence

from .core import Cell, Color, InputError, Pattern, Sft, Unsupported, WindowSft

LEFT, RIGHT = 0, 1
BLACK = 0


# --------------------------------------------------------------------------
# interpretations


class Interpretation(Mapping[Cell, frozenset]):
    """Per-cell sets of base colours; cells never mentioned read as the empty set."""

    def __init__(self, sets: Mapping[Cell, frozenset]):
        self._sets = {c: frozenset(s) for c, s in sets.items()}

    def __getitem__(self, cell: Cell) -> frozenset:
        return self._sets.get(cell, frozenset())

    def __iter__(self):
        return iter(sorted(self._sets))

    def __len__(self) -> int:
        return len(self._sets)

    def __repr__(self) -> str:
        body = ", ".join(f"{c}: {sorted(s)}" for c, s in sorted(self._sets.items()))
        return f"Interpretation({{{body}}})"

    def completions(self, cells: Sequence[Cell]):
        """All full colourings of ``cells`` compatible with the sets."""
        for combo in itertools.product(*(sorted(self[c]) for c in cells)):
            yield dict(zip(cells, combo))


@dataclass(frozen=True)
class ArrowAlphabet:
    """Colour 0 is the black tile; the rest encode (own, pushed, direction)."""

    base: tuple[str, ...]

    @property
    def size(self) -> int:
        return 2 * len(self.base) ** 2 + 1

    def encode(self, own: Color, pushed: Color, direction: int) -> Color:
        k = len(self.base)
        if not (0 <= own < k and 0 <= pushed < k and direction in (LEFT, RIGHT)):
            raise InputError(f"bad arrow colour {(own, pushed, direction)}")
        return 1 + (own * k + pushed) * 2 + direction

    def decode(self, color: Color) -> tuple[Color, Color, int] | None:
        if color == BLACK:
            return None
        k = len(self.base)
        rest, direction = divmod(color - 1, 2)
        own, pushed = divmod(rest, k)
        if not 0 <= own < k:
            raise InputError(f"colour {color} outside the arrow alphabet")
        return own, pushed, direction

    def names(self) -> list[str]:
        out = ["#"]
        for own in self.base:
            for pushed in self.base:
                out += [f"{own}{pushed}<", f"{own}{pushed}>"]
        return out


def interpret_arrow(pattern: Mapping[Cell, Color], alphabet: ArrowAlphabet) -> Interpretation:
    """Own colour of a tile, plus colours pushed by neighbouring arrows pointing at the cell."""
    sets: dict[Cell, set] = {}
    for (x, *rest), color in pattern.items():
        if rest:
            raise Unsupported("arrow interpretation is one-dimensional")
        sets.setdefault((x,), set())
        dec = alphabet.decode(color)
        if dec is None:
            continue
        own, pushed, direction = dec
        sets[(x,)].add(own)
        target = (x + 1,) if direction == RIGHT else (x - 1,)
        sets.setdefault(target, set()).add(pushed)
    return Interpretation(sets)


@dataclass(frozen=True)
class VoteAlphabet:
    """Colour 0 is black; colour 1 + code is a tuple of ``width`` base colours (first component most significant)."""

    base: tuple[str, ...]
    width: int

    @property
    def size(self) -> int:
        return len(self.base) ** self.width + 1

    def encode(self, votes: Sequence[Color]) -> Color:
        if len(votes) != self.width:
            raise InputError(f"vote tuples have width {self.width}, got {len(votes)}")
        k = len(self.base)
        code = 0
        for a in votes:
            if not 0 <= a < k:
                raise InputError(f"colour {a} outside the base alphabet")
            code = code * k + a
        return code + 1

    def decode(self, color: Color) -> tuple[Color, ...] | None:
        if color == BLACK:
            return None
        k = len(self.base)
        code = color - 1
        if not 0 <= code < k ** self.width:
            raise InputError(f"colour {color} outside the vote alphabet")
        out = []
        for _ in range(self.width):
            code, a = divmod(code, k)
            out.append(a)
        return tuple(reversed(out))


def interpret_vote(pattern: Mapping[Cell, Color], alphabet: VoteAlphabet, radius: int, threshold: int = 1,
                   mode: str = "set", cells: Sequence[Cell] | None = None) -> Interpretation:
    """Voting reading: the tile at ``i + k`` contributes its component ``k`` (centre-relative) to cell ``i``.

    ``set`` mode keeps every colour with at least ``threshold`` votes;
    ``majority`` mode keeps the most voted colour, ties going to the lowest id.
    Cells whose neighbourhood holds only black tiles get no interpretation.
    """
    if alphabet.width != 2 * radius + 1:
        raise InputError(f"vote width {alphabet.width} does not match radius {radius}")
    if mode not in ("set", "majority"):
        raise InputError(f"unknown vote mode {mode!r}")
    decoded = {c[0]: alphabet.decode(a) for c, a in pattern.items()}
    if cells is None:
        xs = {x + k for x in decoded for k in range(-radius, radius + 1)}
        cells = [(x,) for x in sorted(xs)]
    sets = {}
    for (i,) in cells:
        votes: Counter = Counter()
        for k in range(-radius, radius + 1):
            tup = decoded.get(i + k)
            if tup is not None:
                votes[tup[k + radius]] += 1
        if not votes:
            sets[(i,)] = frozenset()
        elif mode == "set":
            sets[(i,)] = frozenset(a for a, n in votes.items() if n >= threshold)
        else:
            top = max(votes.values())
            sets[(i,)] = frozenset({min(a for a, n in votes.items() if n == top)})
    return Interpretation(sets)


# --------------------------------------------------------------------------
# derived games


class _BaseRules:
    """Fast admissibility test for 1D words against a base SFT."""

    def __init__(self, base: Sft):
        if base.dimension != 1:
            raise Unsupported("reductions act on 1D SFTs; use linewise() for higher dimensions")
        self.rules = [tuple((c[0], a) for c, a in p.items_sorted) for p in base.forbidden]

    def violates(self, word: Sequence[Color]) -> bool:
        n = len(word)
        for rule in self.rules:
            span = rule[-1][0]
            for s in range(n - span):
                if all(word[s + x] == a for x, a in rule):
                    return True
        return False


def _half_width(span: int) -> int:
    n = 1
    while 2 * n + 1 < span:
        n += 1
    return n


def build_arrow_game(base: Sft) -> WindowSft:
    """Derived game over black tiles and arrows; windows of length ``2n + 3`` around base windows of ``2n + 1``."""
    rules = _BaseRules(base)
    alpha = ArrowAlphabet(tuple(base.alphabet))
    n = _half_width(base.span())
    inner = range(1, 2 * n + 2)

    def predicate(colors: tuple[Color, ...]) -> bool:
        interp = interpret_arrow({(x,): a for x, a in enumerate(colors)}, alpha)
        choices = [sorted(interp[(x,)]) for x in inner]
        if any(not c for c in choices):
            return True
        return all(rules.violates(w) for w in itertools.product(*choices))

    construction = {"name": "arrow", "n": n, "base": _describe(base)}
    return WindowSft(1, alpha.names(), 2 * n + 3, predicate, construction)


def build_vote_game(base: Sft, width: int = 11, threshold: int = 4, mode: str = "set") -> WindowSft:
    """Derived voting game; windows of length ``m + 2r`` whose inner ``m`` cells are read back."""
    if width % 2 == 0:
        raise InputError("vote width must be odd")
    rules = _BaseRules(base)
    alpha = VoteAlphabet(tuple(base.alphabet), width)
    r = width // 2
    m = base.span()
    cells = [(x,) for x in range(r, r + m)]

    def predicate(colors: tuple[Color, ...]) -> bool:
        interp = interpret_vote({(x,): a for x, a in enumerate(colors)}, alpha, r, threshold, mode, cells)
        choices = [sorted(interp[c]) for c in cells]
        if any(not c for c in choices):
            return True
        return all(rules.violates(w) for w in itertools.product(*choices))

    names = ["#"] + ["".join(t) for t in itertools.product(base.alphabet, repeat=width)] \
        if all(len(a) == 1 for a in base.alphabet) else None
    if names is None:
        names = ["#"] + [f"v{i}" for i in range(1, alpha.size)]
    construction = {"name": "vote", "width": width, "threshold": threshold, "mode": mode,
                    "inner_offset": r, "base": _describe(base)}
    return WindowSft(1, names, m + 2 * r, predicate, construction)


def linewise(derived: WindowSft, dimension: int) -> WindowSft:
    """The same window rule applied along the first axis of a higher-dimensional grid."""
    construction = dict(derived.construction, dimension=dimension)
    return WindowSft(dimension, derived.alphabet, derived.window, derived.predicate, construction)


def _describe(base: Sft) -> dict:
    return {
        "alphabet": list(base.alphabet),
        "forbidden": [[{"offset": list(c), "color": base.alphabet[a]} for c, a in p.items_sorted]
                      for p in base.forbidden],
    }


def marking_game(which: str) -> Sft:
    """F2: length-9 words over {a, b} with at least five a; F3: length 15 with at least eight."""
    sizes = {"F2": (9, 5), "F3": (15, 8)}
    if which not in sizes:
        raise InputError(f"unknown marking game {which!r}; expected F2 or F3")
    length, least = sizes[which]
    words = []
    for marks in range(least, length + 1):
        for pos in itertools.combinations(range(length), marks):
            w = [1] * length
            for p in pos:
                w[p] = 0
            words.append(Pattern.from_word(w))
    assert len(words) == sum(comb(length, j) for j in range(least, length + 1))
    return Sft(1, ["a", "b"], words)


# --------------------------------------------------------------------------
# 1D emptiness


def _blocks(sft: Sft):
    rules = _BaseRules(sft)
    m = max(sft.span(), 1)
    k = len(sft.alphabet)
    nodes = [w for w in itertools.product(range(k), repeat=m - 1) if not rules.violates(w)]
    edges = {w: [] for w in nodes}
    node_set = set(nodes)
    for w in nodes:
        for a in range(k):
            u = w + (a,)
            if not rules.violates(u) and u[1:] in node_set:
                edges[w].append(u[1:])
    return rules, m, edges


def domino_1d_empty(sft: Sft) -> bool:
    """Whether no bi-infinite word avoids the forbidden patterns (cycle test on admissible blocks)."""
    if not sft.alphabet:
        return True
    if not sft.forbidden:
        return False
    _, _, edges = _blocks(sft)
    ts = TopologicalSorter({v: [] for v in edges})
    for w, outs in edges.items():
        for v in outs:
            ts.add(v, w)
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def smallest_inadmissible_length(sft: Sft) -> int | None:
    """Least m such that every word of length m contains a forbidden pattern; None when the SFT is nonempty."""
    if not sft.alphabet:
        return 0
    if not domino_1d_empty(sft):
        return None
    rules, m, edges = _blocks(sft)
    if not edges:
        k = len(sft.alphabet)
        for length in range(m):
            if all(rules.violates(w) for w in itertools.product(range(k), repeat=length)):
                return length
        return m - 1
    ts = TopologicalSorter({v: [] for v in edges})
    for w, outs in edges.items():
        for v in outs:
            ts.add(v, w)
    longest = {}
    preds: dict = {v: [] for v in edges}
    for w, outs in edges.items():
        for v in outs:
            preds[v].append(w)
    for v in ts.static_order():
        longest[v] = max((longest[p] + 1 for p in preds[v]), default=0)
    return (m - 1) + max(longest.values()) + 1
