"""Turn-order words over {A, B}.

Three kinds of words are supported:

* eventually periodic words ``prefix . period^omega``,
* mechanical words of rational slope (periodic, but given by slope/intercept),
* arbitrary generated words (``FunctionWord``), e.g. the block products used
  to show that frequency alone does not settle decidability.  Those are not
  finite-state and the solvers refuse them.
"""

from __future__ import annotations

import enum
import math
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import DominoError, InputError, Unsupported


class BalanceWarning(UserWarning):
    pass


class ClassificationError(DominoError):
    pass


class TurnWord:
    """Abstract infinite word over {A, B}."""

    def letter(self, n: int) -> str:
        raise NotImplementedError

    def prefix(self, n: int) -> str:
        return "".join(self.letter(i) for i in range(n))

    # finite-state interface used by the solvers: a residue identifies the
    # future of the word from some index on.
    def finite_state(self) -> "EventuallyPeriodic":
        raise Unsupported(f"{self!r} is not finite-state")

    def is_finite_state(self) -> bool:
        try:
            self.finite_state()
        except Unsupported:
            return False
        return True

    @staticmethod
    def parse(text: str) -> "TurnWord":
        return parse_word(text)


@dataclass(frozen=True)
class EventuallyPeriodic(TurnWord):
    prefix_word: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise InputError("period must be nonempty")
        bad = set(self.prefix_word + self.period) - {"A", "B"}
        if bad:
            raise InputError(f"turn words use only A and B, got {sorted(bad)}")

    def letter(self, n: int) -> str:
        p = len(self.prefix_word)
        if n < p:
            return self.prefix_word[n]
        return self.period[(n - p) % len(self.period)]

    def finite_state(self) -> "EventuallyPeriodic":
        return self

    @property
    def n_residues(self) -> int:
        return len(self.prefix_word) + len(self.period)

    def residue(self, n: int) -> int:
        p = len(self.prefix_word)
        return n if n < p else p + (n - p) % len(self.period)

    def next_residue(self, r: int) -> int:
        p = len(self.prefix_word)
        r += 1
        if r >= p + len(self.period):
            r = p
        return r

    def player_at(self, r: int) -> str:
        return self.letter(r)

    def __str__(self) -> str:
        body = f"({self.period})*"
        return f"{self.prefix_word}|{body}" if self.prefix_word else body


@dataclass(frozen=True)
class Mechanical(TurnWord):
    """Lower mechanical word: letter n is A iff floor((n+1)a+r) - floor(na+r) = 1."""

    slope: Fraction
    intercept: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "slope", Fraction(self.slope))
        object.__setattr__(self, "intercept", Fraction(self.intercept))
        if not 0 <= self.slope <= 1:
            raise InputError("slope must lie in [0, 1]")
        if not 0 <= self.intercept < 1:
            raise InputError("intercept must lie in [0, 1)")

    def letter(self, n: int) -> str:
        a, r = self.slope, self.intercept
        return "A" if math.floor((n + 1) * a + r) - math.floor(n * a + r) == 1 else "B"

    def finite_state(self) -> EventuallyPeriodic:
        q = self.slope.denominator
        return EventuallyPeriodic("", self.prefix(q))

    def __str__(self) -> str:
        return f"sturmian:{self.slope}:{self.intercept.numerator}/{self.intercept.denominator}"


@dataclass(frozen=True)
class FunctionWord(TurnWord):
    name: str
    fn: Callable[[int], str]

    def letter(self, n: int) -> str:
        return self.fn(n)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TurnCursor:
    word: TurnWord
    index: int = 0

    @property
    def player(self) -> str:
        return self.word.letter(self.index)

    def advance(self, k: int = 1) -> "TurnCursor":
        return TurnCursor(self.word, self.index + k)

    def residue(self) -> int:
        return self.word.finite_state().residue(self.index)


# --------------------------------------------------------------------------
# named words


def alternating(first: str = "A") -> EventuallyPeriodic:
    return EventuallyPeriodic("", "AB" if first == "A" else "BA")


def _s2_letter(i: int) -> str:
    # block n = A (AB)^n starts at index n^2 - 1
    n = math.isqrt(i + 1)
    offset = i - (n * n - 1)
    return "A" if offset == 0 or (offset - 1) % 2 == 0 else "B"


def s2_block(i: int) -> int:
    """Index n of the block A(AB)^n of s2 containing turn ``i``."""
    return math.isqrt(i + 1)


def s2_word() -> FunctionWord:
    """prod_{n>=1} A (AB)^n"""
    return FunctionWord("s2", _s2_letter)


def s1_word() -> FunctionWord:
    """prod_{n>=1} (A (AB)^n)^{v(n, 1, n)}"""
    cache: list[str] = []

    def letter(i: int) -> str:
        n = 1
        while len(cache) <= i:
            reps = v(n, 1, n)
            block = "A" + "AB" * n
            cache.extend(block * reps)
            n += 1
        return cache[i]

    return FunctionWord("s1", letter)


_NAMED = {"s1": s1_word, "s2": s2_word}
_SYNTAX = re.compile(r"^(?:(?P<prefix>[AB]*)\|)?\((?P<period>[AB]+)\)\*$")
_MECH = re.compile(r"^sturmian:(?P<slope>\d+(?:/\d+)?):(?P<icpt>\d+(?:/\d+)?)$")


def parse_word(text: str) -> TurnWord:
    """Parse ``(AB)*``, ``B|(AB)*``, ``sturmian:13/21:0/1`` or a named word."""
    s = text.strip()
    if s in _NAMED:
        return _NAMED[s]()
    m = _SYNTAX.match(s)
    if m:
        return EventuallyPeriodic(m.group("prefix") or "", m.group("period"))
    m = _MECH.match(s)
    if m:
        try:
            return Mechanical(Fraction(m.group("slope")), Fraction(m.group("icpt")))
        except ZeroDivisionError:
            raise InputError(f"zero denominator in {text!r}") from None
    col = _first_bad_column(s)
    raise InputError(f"cannot parse turn word {text!r} (column {col})")


def _first_bad_column(s: str) -> int:
    for i, ch in enumerate(s):
        if ch not in "AB|()*":
            return i + 1
    return len(s) + 1


# --------------------------------------------------------------------------
# balancedness, frequency, classification


def is_balanced_up_to(word: TurnWord, N: int) -> bool:
    """Window check over indices 0..N: all windows [i, i+n] of one length have A-counts within 1."""
    if N < 1:
        raise InputError("N must be >= 1")
    s = word.prefix(N + 1)
    acc = [0]
    for ch in s:
        acc.append(acc[-1] + (ch == "A"))
    for n in range(0, N + 1):
        counts = [acc[i + n + 1] - acc[i] for i in range(0, N - n + 1)]
        if max(counts) - min(counts) > 1:
            return False
    return True


def default_scan_depth(word: TurnWord) -> int:
    fs = word.finite_state()
    return 4 * (len(fs.prefix_word) + len(fs.period))


def frequency(word: TurnWord) -> Fraction:
    if isinstance(word, Mechanical):
        return word.slope
    fs = word.finite_state()
    f = Fraction(fs.period.count("A"), len(fs.period))
    n = 3 * (len(fs.prefix_word) + len(fs.period))
    if not is_balanced_up_to(fs, max(n, 1)):
        warnings.warn(f"{fs} is not balanced; frequency computed on the period", BalanceWarning, stacklevel=2)
    return f


class Case(str, enum.Enum):
    FREQ_ZERO = "FreqZero"
    AT_MOST_THIRD_NO_ABA = "FreqAtMostThird_NoABA"
    AT_MOST_THIRD_ONE_ABA = "FreqAtMostThird_OneABA"
    MID_NO_AA = "MidFreq_NoAA"
    MID_ONE_AA = "MidFreq_OneAA"
    ABOVE_HALF = "FreqAboveHalf"

    @property
    def decidable(self) -> bool:
        return self in (Case.FREQ_ZERO, Case.ABOVE_HALF)


@dataclass(frozen=True)
class BalancedCase:
    tag: Case
    frequency: Fraction
    scan_depth: int
    occurrences: int  # of the factor that splits the case (AA or ABA)
    gap_k: int | None = None
    prefix_certified: bool = False  # census only holds on the scanned prefix

    def __str__(self) -> str:
        return self.tag.value


def occurrences(s: str, factor: str) -> list[int]:
    return [i for i in range(len(s) - len(factor) + 1) if s.startswith(factor, i)]


def classify(word: TurnWord, scan_depth: int | None = None) -> BalancedCase:
    if scan_depth is None:
        scan_depth = default_scan_depth(word) if word.is_finite_state() else 200
    f = frequency(word)
    s = word.prefix(scan_depth)
    certified = not word.is_finite_state() or isinstance(word, Mechanical)
    aa = occurrences(s, "AA")
    aba = occurrences(s, "ABA")

    if f == 0:
        if s.count("A") > 1:
            raise ClassificationError(f"frequency 0 but {s.count('A')} A's in the first {scan_depth} letters")
        return BalancedCase(Case.FREQ_ZERO, f, scan_depth, s.count("A"), None, certified)
    if f > Fraction(1, 2):
        if len(aa) < 2:
            raise ClassificationError(f"frequency {f} > 1/2 but fewer than two AA in {scan_depth} letters")
        k = gap_bound(word, "AA", scan_depth)
        return BalancedCase(Case.ABOVE_HALF, f, scan_depth, len(aa), k, certified)
    if f > Fraction(1, 3):
        if len(aa) > 1:
            raise ClassificationError(f"frequency {f} <= 1/2 but {len(aa)} AA occurrences: not balanced")
        k = gap_bound(word, "ABA", scan_depth) if len(aba) >= 2 else None
        tag = Case.MID_ONE_AA if aa else Case.MID_NO_AA
        return BalancedCase(tag, f, scan_depth, len(aa), k, certified)
    if aa:
        raise ClassificationError(f"frequency {f} <= 1/3 but AA occurs: not balanced")
    if len(aba) > 1:
        raise ClassificationError(f"frequency {f} <= 1/3 but {len(aba)} ABA occurrences: not balanced")
    tag = Case.AT_MOST_THIRD_ONE_ABA if aba else Case.AT_MOST_THIRD_NO_ABA
    return BalancedCase(tag, f, scan_depth, len(aba), None, certified)


def gap_bound(word: TurnWord, factor: str, scan_depth: int) -> int:
    """Smallest k >= 1 with consecutive ``factor`` occurrences at most 2k+1 (AA) or 3k+2 (ABA) apart."""
    if factor not in ("AA", "ABA"):
        raise InputError("gap bounds are defined for the factors AA and ABA")
    occ = occurrences(word.prefix(scan_depth), factor)
    if len(occ) < 2:
        raise ClassificationError(f"{factor} occurs {len(occ)} time(s) in {scan_depth} letters")
    dist = max(b - a for a, b in zip(occ, occ[1:]))
    if factor == "AA":
        k = -(-(dist - 1) // 2)
    else:
        k = -(-(dist - 2) // 3)
    return max(k, 1)


def v(n: int, c: int, k: int) -> int:
    """Turns the isolation strategy needs: c(2k+1)((k+1)^n - 1)/k."""
    if k <= 0:
        raise InputError("k must be >= 1")
    if n < 0 or c < 0:
        raise InputError("n and c must be >= 0")
    num = c * (2 * k + 1) * ((k + 1) ** n - 1)
    assert num % k == 0
    return num // k


def budget_sequence(f: Fraction, steps: int) -> list[tuple[Fraction, int]]:
    """Budgets b_i and A's block sizes floor(b_i) of the budget game with ratio f/(1-f)."""
    f = Fraction(f)
    if f == 1:
        raise InputError("f = 1 gives B no turns")
    if not 0 <= f < 1:
        raise InputError("f must lie in [0, 1)")
    ratio = f / (1 - f)
    b = ratio
    out = []
    for _ in range(steps):
        plays = math.floor(b)
        out.append((b, plays))
        b = b - plays + ratio
    return out
