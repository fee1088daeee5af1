import pytest

from conftest import word_sft
from dominogames.core import InputError, Pattern, Place, Sft
from dominogames.reductions import marking_game
from dominogames.strategies import (InvariantMonitor, PassStrategy, ScriptedStrategy, a_isolation_strategy,
                                    a_palindrome_strategy, b_four_rule_strategy, four_rule_invariant_1,
                                    four_rule_invariant_2, palindrome_game)
from dominogames.verifier import Certificate, VerifySpec, exhaust, prove_A_wins, replay

FOUR_RULE_MONITORS = [InvariantMonitor("invariant-1", four_rule_invariant_1),
                      InvariantMonitor("invariant-2", four_rule_invariant_2)]


def test_palindrome_one_depth_ten():
    spec = VerifySpec(palindrome_game(1), a_palindrome_strategy(1), "A", depth=10, locality=6, variant="no-pass")
    report = exhaust(spec)
    assert report.verdict == "verified"
    assert report.record()["locality"] == 6


def test_locality_doubling_keeps_verdict():
    for L in (6, 12):
        spec = VerifySpec(palindrome_game(1), a_palindrome_strategy(1), "A", depth=10, locality=L, variant="no-pass")
        assert exhaust(spec).verdict == "verified"


@pytest.mark.parametrize("turns", ["(ABB)*", "B|(ABB)*"])
def test_four_rule_small(turns):
    spec = VerifySpec(marking_game("F2"), b_four_rule_strategy(), "B", turns, depth=6, locality=8,
                      objective="no-forbidden", monitors=FOUR_RULE_MONITORS)
    assert exhaust(spec).verdict == "verified"


def test_pass_loses_to_single_tile():
    spec = VerifySpec(word_sft("x", "x"), PassStrategy(), "B", depth=4, objective="no-forbidden")
    report = exhaust(spec)
    assert report.verdict == "counterexample"
    assert report.violation_ply == 1 and report.reason == "forbidden pattern"
    assert replay(spec, report)


def test_monitor_counterexample_replays():
    spec = VerifySpec(marking_game("F2"), PassStrategy(), "B", "(AB)*", depth=4, locality=2,
                      objective="monitor-holds", monitors=FOUR_RULE_MONITORS)
    report = exhaust(spec)
    assert report.verdict == "counterexample"
    assert report.reason == "monitor invariant-1" and report.violation_ply == 2
    assert replay(spec, report)


def test_illegal_strategy_move_is_reported(aa_game):
    bad = ScriptedStrategy([Place((0,), 1), Place((0,), 1)])
    spec = VerifySpec(aa_game, bad, "A", "(AAB)*", depth=4, locality=1)
    report = exhaust(spec)
    assert report.verdict == "counterexample" and report.reason.startswith("strategy played")
    assert replay(spec, report)


def test_strategy_that_never_wins(aa_game):
    spec = VerifySpec(aa_game, PassStrategy(), "A", depth=3, locality=1)
    report = exhaust(spec)
    assert report.verdict == "counterexample" and report.violation_ply == 3
    assert replay(spec, report)


def test_budget_gives_inconclusive():
    spec = VerifySpec(marking_game("F2"), b_four_rule_strategy(), "B", "(ABB)*", depth=9, locality=12,
                      objective="no-forbidden", node_budget=50)
    report = exhaust(spec)
    assert report.verdict == "inconclusive" and report.frontier > 0
    assert "frontier" in report.record()


def test_parallel_matches_serial(aa_game):
    for strategy, player in ((PassStrategy(), "B"), (b_four_rule_strategy(), "B")):
        sft = aa_game if isinstance(strategy, PassStrategy) else marking_game("F2")
        base = dict(sft=sft, strategy=strategy, player=player, turns="(ABB)*", depth=5, locality=4,
                    objective="no-forbidden")
        serial = exhaust(VerifySpec(**base))
        parallel = exhaust(VerifySpec(**base, workers=2))
        assert serial.verdict == parallel.verdict
        assert serial.counterexample == parallel.counterexample


def test_isolation_exhaustive():
    st = a_isolation_strategy([1], 1, 1, "(AAB)*")
    assert exhaust(VerifySpec(word_sft("ab", "b"), st, "A", "(AAB)*", depth=3, locality=6)).verdict == "verified"
    st = a_isolation_strategy([0, 0], 1, 1, "(AAB)*")
    report = exhaust(VerifySpec(word_sft("ab", "aa"), st, "A", "(AAB)*", depth=st.total, locality=6))
    assert st.total == 9 and report.verdict == "verified"


def test_spec_validation(aa_game):
    with pytest.raises(InputError):
        VerifySpec(aa_game, PassStrategy(), "C")
    with pytest.raises(InputError):
        VerifySpec(aa_game, PassStrategy(), "B", objective="win")
    with pytest.raises(InputError):
        VerifySpec(aa_game, PassStrategy(), "B", objective="monitor-holds")
    spec = VerifySpec(aa_game, PassStrategy(), "B")
    assert spec.locality == 2 * aa_game.diameter() + 4


# -- prover ------------------------------------------------------------------

def test_prove_single_tile():
    cert = prove_A_wins(word_sft("x", "x"))
    assert (cert.kind, cert.parameter) == ("horizon", 1)
    assert cert.replay()


def test_prove_horizontal_pair_in_the_plane():
    xx = Sft(2, ["x"], [Pattern({(0, 0): 0, (1, 0): 0})])
    cert = prove_A_wins(xx)
    assert (cert.kind == "horizon" and cert.parameter == 3) or (cert.kind == "window" and cert.parameter <= 2)
    assert cert.replay()


def test_certificates_cross_validate():
    xx = Sft(2, ["x"], [Pattern({(0, 0): 0, (1, 0): 0})])
    w = prove_A_wins(xx, modes=["window"])
    h = prove_A_wins(xx, modes=["horizon"])
    assert w.kind == "window" and h.kind == "horizon"
    assert w.replay() and h.replay()


def test_prove_empty_forbidden_is_inconclusive():
    log = prove_A_wins(Sft(1, ["a"], []), budget=10_000, max_parameter=5, attempt=True)
    assert log.certificate is None
    assert log.record()["result"] == "inconclusive"


def test_prove_zugzwang_without_pass(zugzwang):
    log = prove_A_wins(zugzwang, "B|(AB)*", variant="no-pass", attempt=True)
    assert log.certificate == Certificate("horizon", 4, zugzwang, "B|(AB)*", log.certificate.variant)
    assert all(kind == "horizon" for kind, _, _ in log.tried)


def test_prove_rejects_unknown_mode(aa_game):
    with pytest.raises(InputError):
        prove_A_wins(aa_game, modes=["guess"])
