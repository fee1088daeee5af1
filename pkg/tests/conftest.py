import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
sys.setrecursionlimit(20000)

from dominogames.core import Pattern, Sft  # noqa: E402


def word_sft(alphabet, *words):
    """1D SFT from forbidden words given as strings over the alphabet names (single-char names)."""
    names = list(alphabet)
    return Sft(1, names, [Pattern.from_word([names.index(ch) for ch in w]) for w in words])


@pytest.fixture
def zugzwang():
    return word_sft("01", "000", "111")


@pytest.fixture
def aa_game():
    return word_sft("ab", "aa")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
