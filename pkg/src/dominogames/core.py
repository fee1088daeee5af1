"""Grid, pattern, SFT and game-state primitives.

Cells are plain integer tuples, colours are small integers indexing into an
alphabet's name table.  Everything here is immutable once built.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

Cell = tuple[int, ...]
Color = int


class DominoError(Exception):
    """Base class for library errors."""


class InputError(DominoError, ValueError):
    """Malformed input (colour outside the alphabet, bad dimension, ...)."""


class IllegalMove(DominoError):
    pass


class Unsupported(DominoError):
    pass


def add(a: Cell, b: Cell) -> Cell:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Cell, b: Cell) -> Cell:
    return tuple(x - y for x, y in zip(a, b))


def l1(a: Cell, b: Cell) -> int:
    return sum(abs(x - y) for x, y in zip(a, b))


def l1_to_set(cell: Cell, cells: Iterable[Cell]) -> int | float:
    return min((l1(cell, c) for c in cells), default=float("inf"))


def ball(center: Cell, radius: int) -> Iterator[Cell]:
    """All cells at L1 distance <= radius from ``center``."""
    d = len(center)
    if d == 1:
        for dx in range(-radius, radius + 1):
            yield (center[0] + dx,)
        return
    for offs in itertools.product(range(-radius, radius + 1), repeat=d):
        if sum(map(abs, offs)) <= radius:
            yield add(center, offs)


def is_connected(cells: Iterable[Cell]) -> bool:
    cells = set(cells)
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    todo = [start]
    while todo:
        c = todo.pop()
        for k in range(len(c)):
            for step in (-1, 1):
                n = c[:k] + (c[k] + step,) + c[k + 1:]
                if n in cells and n not in seen:
                    seen.add(n)
                    todo.append(n)
    return len(seen) == len(cells)


class Pattern(Mapping[Cell, Color]):
    """A finite partial colouring of Z^d, stored as a sorted sparse map."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, entries: Mapping[Cell, Color] | Iterable[tuple[Cell, Color]] = ()):
        if isinstance(entries, Mapping):
            entries = entries.items()
        m: dict[Cell, Color] = {}
        for cell, color in entries:
            cell = tuple(cell)
            if cell in m:
                raise InputError(f"cell {cell} appears twice")
            m[cell] = color
        self._items = tuple(sorted(m.items()))
        self._map = m
        self._hash = None

    @classmethod
    def from_word(cls, word: Sequence[Color], start: int = 0) -> "Pattern":
        """1D pattern with ``word[j]`` at cell ``start + j`` (None entries skipped)."""
        return cls({(start + j,): c for j, c in enumerate(word) if c is not None})

    def __getitem__(self, cell: Cell) -> Color:
        return self._map[cell]

    def __iter__(self):
        return (c for c, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, cell) -> bool:
        return cell in self._map

    def get(self, cell, default=None):
        return self._map.get(cell, default)

    def __eq__(self, other) -> bool:
        if isinstance(other, Pattern):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{c}: {a}" for c, a in self._items)
        return f"Pattern({{{body}}})"

    @property
    def items_sorted(self) -> tuple[tuple[Cell, Color], ...]:
        return self._items

    def support(self) -> frozenset[Cell]:
        return frozenset(self._map)

    @property
    def dimension(self) -> int | None:
        return len(self._items[0][0]) if self._items else None

    def with_tile(self, cell: Cell, color: Color) -> "Pattern":
        if cell in self._map:
            raise IllegalMove(f"cell {cell} already coloured")
        p = Pattern.__new__(Pattern)
        m = dict(self._map)
        m[cell] = color
        p._map = m
        p._items = tuple(sorted(m.items()))
        p._hash = None
        return p

    def translate(self, v: Cell) -> "Pattern":
        return Pattern({add(c, v): a for c, a in self._items})

    def normalized(self) -> "Pattern":
        """Translate so the lexicographic minimum of the support is the origin."""
        if not self._items:
            return self
        origin = self._items[0][0]
        return Pattern({sub(c, origin): a for c, a in self._items})

    def is_subpattern_of(self, other: Mapping[Cell, Color]) -> bool:
        return all(other.get(c) == a for c, a in self._items)

    def restrict(self, cells: Iterable[Cell]) -> "Pattern":
        return Pattern({c: self._map[c] for c in cells if c in self._map})

    def bounding_box(self) -> tuple[Cell, Cell] | None:
        if not self._items:
            return None
        d = len(self._items[0][0])
        lo = tuple(min(c[k] for c in self._map) for k in range(d))
        hi = tuple(max(c[k] for c in self._map) for k in range(d))
        return lo, hi


# --------------------------------------------------------------------------
# SFTs


class Witness(NamedTuple):
    index: int
    translation: Cell


class _Shape(NamedTuple):
    cells: tuple[Cell, ...]
    # colours tuple (in ``cells`` order) -> forbidden index, or None
    match: Callable[[tuple[Color, ...]], int | None]


class Sft:
    """An SFT given by an explicit finite list of forbidden patterns."""

    def __init__(self, dimension: int, alphabet: Sequence[str], forbidden: Iterable[Pattern | Mapping] = ()):
        if dimension < 1:
            raise InputError("dimension must be >= 1")
        self.dimension = dimension
        self.alphabet = tuple(alphabet)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InputError("duplicate colour names in alphabet")
        pats = []
        for p in forbidden:
            p = p if isinstance(p, Pattern) else Pattern(p)
            if not p:
                raise InputError("forbidden patterns must be nonempty")
            for c, a in p.items_sorted:
                if len(c) != dimension:
                    raise InputError(f"cell {c} has wrong dimension")
                self.check_color(a)
            pats.append(p.normalized())
        self.forbidden: tuple[Pattern, ...] = tuple(pats)
        self._shapes = self._build_shapes()

    def _build_shapes(self) -> list[_Shape]:
        by_shape: dict[tuple[Cell, ...], dict[tuple[Color, ...], int]] = {}
        for idx, p in enumerate(self.forbidden):
            cells = tuple(c for c, _ in p.items_sorted)
            colors = tuple(a for _, a in p.items_sorted)
            by_shape.setdefault(cells, {}).setdefault(colors, idx)
        return [_Shape(cells, table.get) for cells, table in by_shape.items()]

    def check_color(self, a) -> None:
        if not isinstance(a, int) or not 0 <= a < len(self.alphabet):
            raise InputError(f"colour {a!r} outside alphabet of size {len(self.alphabet)}")

    def color(self, name: str) -> Color:
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise InputError(f"unknown colour {name!r}") from None

    @property
    def shapes(self) -> list[_Shape]:
        return self._shapes

    @property
    def is_empty_rulebook(self) -> bool:
        return not self._shapes

    def min_pattern_size(self) -> int:
        return min((len(s.cells) for s in self._shapes), default=0)

    def diameter(self) -> int:
        """Largest L1 diameter of a forbidden pattern."""
        best = 0
        for s in self._shapes:
            for a in s.cells:
                for b in s.cells:
                    best = max(best, l1(a, b))
        return best

    def span(self) -> int:
        """Largest extent along axis 0 (1D: the longest forbidden window)."""
        best = 0
        for s in self._shapes:
            xs = [c[0] for c in s.cells]
            best = max(best, max(xs) - min(xs) + 1)
        return best

    def all_connected(self) -> bool:
        return all(is_connected(s.cells) for s in self._shapes)

    def touching(self, colour_at: Mapping[Cell, Color], cell: Cell) -> Witness | None:
        """A forbidden occurrence in ``colour_at`` whose support contains ``cell``."""
        get = colour_at.get
        for shape in self._shapes:
            for anchor in shape.cells:
                v = sub(cell, anchor)
                cols = []
                for s in shape.cells:
                    a = get(add(s, v))
                    if a is None:
                        break
                    cols.append(a)
                else:
                    idx = shape.match(tuple(cols))
                    if idx is not None:
                        return Witness(idx, v)
        return None

    def occurrences(self, colour_at: Mapping[Cell, Color]) -> list[Witness]:
        found = set()
        get = colour_at.get
        for shape in self._shapes:
            translations = {sub(p, s) for p in colour_at for s in shape.cells}
            for v in translations:
                cols = []
                for s in shape.cells:
                    a = get(add(s, v))
                    if a is None:
                        break
                    cols.append(a)
                else:
                    idx = shape.match(tuple(cols))
                    if idx is not None:
                        found.add(Witness(idx, v))
        return sorted(found, key=lambda w: (w.translation, w.index))

    def forbidden_words(self) -> Iterator[tuple[Color, ...]]:
        """1D contiguous forbidden patterns as words (used by the de Bruijn oracle)."""
        for p in self.forbidden:
            yield tuple(a for _, a in p.items_sorted)

    def __repr__(self) -> str:
        return f"Sft(d={self.dimension}, |A|={len(self.alphabet)}, |F|={len(self.forbidden)})"


class WindowSft(Sft):
    """An SFT whose forbidden set is a predicate on contiguous windows along axis 0.

    ``predicate(colours)`` receives the colours of ``window`` consecutive cells
    and says whether that window is forbidden.  The forbidden set is never
    materialised.
    """

    def __init__(self, dimension: int, alphabet: Sequence[str], window: int,
                 predicate: Callable[[tuple[Color, ...]], bool], construction: dict | None = None):
        if window < 1:
            raise InputError("window must be >= 1")
        self.window = window
        self.predicate = predicate
        self.construction = construction or {}
        self._cache: dict[tuple[Color, ...], bool] = {}
        super().__init__(dimension, alphabet, ())

    def _build_shapes(self) -> list[_Shape]:
        zeros = (0,) * (self.dimension - 1)
        cells = tuple((x,) + zeros for x in range(self.window))
        return [_Shape(cells, self._match)]

    def _match(self, colors: tuple[Color, ...]) -> int | None:
        hit = self._cache.get(colors)
        if hit is None:
            hit = bool(self.predicate(colors))
            if len(self._cache) < 1_000_000:
                self._cache[colors] = hit
        return 0 if hit else None

    def forbidden_words(self):
        raise Unsupported("predicate SFT has no materialised forbidden list")

    def is_forbidden_word(self, colors: Sequence[Color]) -> bool:
        return self._match(tuple(colors)) is not None

    def __repr__(self) -> str:
        return f"WindowSft(d={self.dimension}, |A|={len(self.alphabet)}, window={self.window})"


def find_forbidden(pattern: Mapping[Cell, Color], sft: Sft) -> Witness | None:
    """First forbidden occurrence in ``pattern``, scanning translations lexicographically."""
    for c, a in pattern.items():
        sft.check_color(a)
        if len(c) != sft.dimension:
            raise InputError(f"cell {c} has wrong dimension")
    occ = sft.occurrences(pattern)
    return occ[0] if occ else None


# --------------------------------------------------------------------------
# Moves, regions, positions


class _PassType:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Pass"

    def __reduce__(self):
        return "PASS"


PASS = _PassType()


class Place(NamedTuple):
    cell: Cell
    color: Color


Move = Union[Place, _PassType]


class Variant(str, enum.Enum):
    PASS = "pass"
    NO_PASS = "no-pass"

    @property
    def allows_pass(self) -> bool:
        return self is Variant.PASS


@dataclass(frozen=True)
class Region:
    """Playable region: all of Z^d (radius None) or the box [-n, n]^d."""

    dimension: int
    radius: int | None = None

    def __contains__(self, cell: Cell) -> bool:
        if len(cell) != self.dimension:
            return False
        return self.radius is None or all(-self.radius <= x <= self.radius for x in cell)

    @property
    def finite(self) -> bool:
        return self.radius is not None

    def cells(self) -> list[Cell]:
        if self.radius is None:
            raise Unsupported("the whole grid has no finite cell list")
        r = range(-self.radius, self.radius + 1)
        return list(itertools.product(r, repeat=self.dimension))

    def size(self) -> int | float:
        return float("inf") if self.radius is None else (2 * self.radius + 1) ** self.dimension


@dataclass(frozen=True)
class Position:
    pattern: Pattern
    turn: "TurnCursor"
    region: Region
    variant: Variant = Variant.PASS

    @property
    def player(self) -> str:
        return self.turn.player

    @property
    def ply(self) -> int:
        return self.turn.index


def apply_move(position: Position, move) -> Position:
    if move is PASS:
        if not position.variant.allows_pass:
            raise IllegalMove("pass is not allowed in the no-pass variant")
        pattern = position.pattern
    else:
        cell, color = move
        cell = tuple(cell)
        if cell not in position.region:
            raise IllegalMove(f"cell {cell} outside the playable region")
        if cell in position.pattern:
            raise IllegalMove(f"cell {cell} already coloured")
        if not isinstance(color, int) or color < 0:
            raise IllegalMove(f"bad colour {color!r}")
        pattern = position.pattern.with_tile(cell, color)
    return Position(pattern, position.turn.advance(), position.region, position.variant)


def legal_moves(position: Position, candidates: Iterable[Cell], n_colors: int,
                variant: Variant | None = None) -> list:
    """Place moves on uncoloured candidate cells x colours, plus Pass where allowed."""
    variant = position.variant if variant is None else Variant(variant)
    moves: list = [PASS] if variant.allows_pass else []
    for cell in sorted(set(map(tuple, candidates))):
        if cell in position.pattern or cell not in position.region:
            continue
        moves.extend(Place(cell, a) for a in range(n_colors))
    return moves


def is_final(position: Position | Mapping[Cell, Color], sft: Sft) -> bool:
    pattern = position.pattern if isinstance(position, Position) else position
    return find_forbidden(pattern, sft) is not None


def initial_position(dimension: int, turns, region: Region | None = None,
                     variant: Variant = Variant.PASS, start: int = 0) -> Position:
    from .words import TurnCursor, TurnWord

    cursor = turns if isinstance(turns, TurnCursor) else TurnCursor(turns if isinstance(turns, TurnWord) else TurnWord.parse(turns), start)
    return Position(Pattern(), cursor, region or Region(dimension), Variant(variant))

