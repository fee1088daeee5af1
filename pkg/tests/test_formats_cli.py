import io
import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from conftest import word_sft
from dominogames import cli
from dominogames.core import InputError, Pattern, Place, Sft
from dominogames.formats import (dump_sft, format_record, load_sft, load_verify_config, parse_record, same_sft,
                                 save_sft)
from dominogames.reductions import build_arrow_game, build_vote_game, linewise, marking_game
from dominogames.strategies import ScriptedStrategy, b_four_rule_strategy, palindrome_game
from dominogames.words import parse_word

SFTS = Path(__file__).resolve().parent.parent / "sfts"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    text = out.getvalue()
    return code, (parse_record(text) if text and not text.startswith("{") else text), err.getvalue()


# -- SFT documents -------------------------------------------------------------

def test_sft_roundtrip_explicit(tmp_path):
    sft = Sft(2, ["x", "y"], [Pattern({(0, 0): 0, (1, 0): 1}), Pattern({(0, 0): 1, (0, 1): 1})])
    save_sft(sft, tmp_path / "s.sft")
    assert same_sft(load_sft(tmp_path / "s.sft"), sft)
    assert same_sft(load_sft(dump_sft(sft)), sft)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.data())
def test_sft_roundtrip_random(k, data):
    words = data.draw(st.lists(st.lists(st.integers(0, k - 1), min_size=1, max_size=4), max_size=5))
    sft = Sft(1, [f"c{i}" for i in range(k)], [Pattern.from_word(w) for w in words])
    back = load_sft(dump_sft(sft))
    assert same_sft(back, sft)
    assert [sorted(p.items_sorted) for p in back.forbidden] == [sorted(p.items_sorted) for p in sft.forbidden]


@pytest.mark.parametrize("make", [
    lambda: build_arrow_game(word_sft("01", "11")),
    lambda: build_vote_game(word_sft("ab", "bb"), width=3, threshold=2),
    lambda: linewise(build_arrow_game(word_sft("01", "00", "11")), 2),
])
def test_derived_roundtrip(make):
    game = make()
    back = load_sft(dump_sft(game))
    assert same_sft(back, game)
    assert back.window == game.window and back.dimension == game.dimension
    for colors in [(0,) * game.window, tuple(range(game.window)), (1, 2) * game.window]:
        colors = tuple(c % len(game.alphabet) for c in colors[:game.window])
        assert back.is_forbidden_word(colors) == game.is_forbidden_word(colors)


def test_named_documents_load():
    assert same_sft(load_sft(SFTS / "marking-f2.sft"), marking_game("F2"))
    pal = load_sft(SFTS / "palindrome-2.sft")
    assert same_sft(pal, palindrome_game(2))
    assert same_sft(load_sft(dump_sft(pal)), pal)


@pytest.mark.parametrize("doc,where", [
    ('{"dimension": 0, "alphabet": ["a"], "forbidden": []}', "dimension"),
    ('{"dimension": 1, "alphabet": "ab", "forbidden": []}', "alphabet"),
    ('{"dimension": 1, "alphabet": ["a"], "forbidden": [[{"offset": [0, 1], "color": "a"}]]}',
     "forbidden[0][0].offset"),
    ('{"dimension": 1, "alphabet": ["a"], "forbidden": [[{"offset": [0], "color": "a"}, {"offset": [1], "color": "q"}]]}',
     "forbidden[0][1].color"),
    ('{"dimension": 1, "alphabet": ["a"], "forbidden": [[]]}', "forbidden[0]"),
    ('{"dimension": 1, "alphabet": ["a"], "predicate": {"name": "nonsense"}}', "predicate.name"),
    ('{"dimension": 1,\n "alphabet": ["a"],, "forbidden": []}', "line 2, column"),
])
def test_malformed_documents_name_the_position(doc, where):
    with pytest.raises(InputError) as info:
        load_sft(doc)
    assert where in str(info.value)


def test_missing_file():
    with pytest.raises(InputError):
        load_sft("/nonexistent/x.sft")


# -- records -------------------------------------------------------------------

def test_record_format_and_parse():
    rec = {"winner": "A", "value": 3, "exact": True, "frontier": None}
    text = format_record(rec)
    assert text == "winner = A\nvalue = 3\nexact = true\nfrontier = -\n"
    assert parse_record(text) == {"winner": "A", "value": "3", "exact": "true", "frontier": "-"}
    with pytest.raises(InputError):
        parse_record("no separator here")


def test_records_are_deterministic():
    a = run("solve-finite", "--sft", str(SFTS / "aa.sft"), "--n", "1")[1]
    b = run("solve-finite", "--sft", str(SFTS / "aa.sft"), "--n", "1")[1]
    a.pop("seconds"), b.pop("seconds")
    assert a == b


# -- CLI -----------------------------------------------------------------------

def test_cli_zugzwang_pass_variant():
    code, rec, _ = run("solve-finite", "--sft", str(SFTS / "zugzwang.sft"), "--turns", "B|(AB)*",
                       "--variant", "pass", "--n", "2")
    assert code == cli.EXIT_OK and rec["winner"] == "B"
    assert rec["turns"] == "B|(AB)*" and rec["n"] == "2"


def test_cli_word_classify():
    code, rec, _ = run("word", "--classify", "(ABB)*")
    assert code == 0 and rec["tag"] == "FreqAtMostThird_NoABA" and rec["frequency"] == "1/3"


def test_cli_word_roundtrip():
    for text in ["(AB)*", "B|(AB)*", "AAB|(ABB)*", "sturmian:13/21:0/1"]:
        code, rec, _ = run("word", text)
        assert code == 0
        assert str(parse_word(rec["word"])) == rec["word"]
        assert parse_word(rec["word"]).prefix(50) == parse_word(text).prefix(50)


def test_cli_word_numbers():
    code, rec, _ = run("word", "--v", "2", "1", "2", "--budget", "1/2", "--steps", "6")
    assert code == 0 and rec["v"] == "20" and rec["plays"] == "1 1 1 1 1 1"
    assert run("word")[0] == cli.EXIT_INPUT


def test_cli_prove_xx_with_power_budget():
    code, rec, _ = run("prove", "--sft", str(SFTS / "xx.sft"), "--budget", "10^6")
    assert code == 0 and rec["result"] == "certificate" and rec["budget"] == "1000000"
    assert rec["certificate"] in ("window", "horizon")


def test_cli_prove_inconclusive(tmp_path):
    path = tmp_path / "free.sft"
    path.write_text('{"dimension": 1, "alphabet": ["a"], "forbidden": []}')
    code, rec, _ = run("prove", "--sft", str(path), "--budget", "1e4", "--max-parameter", "3")
    assert code == cli.EXIT_INCONCLUSIVE and rec["result"] == "inconclusive"


def test_cli_budget_environment(monkeypatch):
    monkeypatch.setenv(cli.BUDGET_ENV, "10")
    code, rec, _ = run("solve-finite", "--sft", str(SFTS / "zugzwang.sft"), "--n", "3")
    assert code == cli.EXIT_INCONCLUSIVE and rec["result"] == "inconclusive"
    monkeypatch.setenv(cli.BUDGET_ENV, "lots")
    assert run("solve-finite", "--sft", str(SFTS / "zugzwang.sft"), "--n", "1")[0] == cli.EXIT_INPUT


def test_parse_count():
    assert cli.parse_count("10^6") == cli.parse_count("1e6") == cli.parse_count("1_000_000") == 10 ** 6
    with pytest.raises(Exception):
        cli.parse_count("1.5e0")


def test_cli_input_errors():
    code, _, err = run("solve-finite", "--sft", '{"dimension": 1, "alphabet": ["a"], "forbidden": [[{"offset": [0], "color": "b"}]]}',
                       "--n", "1")
    assert code == cli.EXIT_INPUT and "forbidden[0][0].color" in err
    code, _, err = run("word", "(AB")
    assert code == cli.EXIT_INPUT and "column" in err
    assert run("solve-finite", "--n", "1")[0] == cli.EXIT_INPUT
    assert run("bogus")[0] == cli.EXIT_INPUT


def test_cli_json_output():
    code, text, _ = run("word", "(AB)*", "--frequency", "--json")
    assert code == 0 and json.loads(text)["frequency"] == "1/2"


def test_cli_reduce_roundtrip(tmp_path):
    out = tmp_path / "arrow.sft"
    code, rec, _ = run("reduce", "--sft", str(SFTS / "one-one.sft"), "--out", str(out))
    assert code == 0 and rec["alphabet_size"] == "9"
    assert same_sft(load_sft(out), build_arrow_game(load_sft(SFTS / "one-one.sft")))
    code, rec, _ = run("reduce", "--sft", str(SFTS / "one-one.sft"), "--construction", "vote", "--width", "3",
                       "--threshold", "2")
    assert same_sft(load_sft(rec["document"]), build_vote_game(load_sft(SFTS / "one-one.sft"), 3, 2))


def test_cli_run_with_monitors():
    code, rec, _ = run("run", "--sft", str(SFTS / "marking-f2.sft"), "--turns", "(ABB)*", "--a", "random",
                       "--a-param", "seed=4", "--b", "four-rule", "--monitor", "four-rule-1",
                       "--monitor", "four-rule-2", "--max-plies", "40")
    assert code == 0 and rec["winner"] == "B" and rec["violations"] == "-"


def test_cli_run_table_strategies():
    code, rec, _ = run("run", "--sft", str(SFTS / "aa.sft"), "--a", "table", "--b", "table", "--n", "1")
    assert code == 0 and rec["winner"] == "A"


def test_verify_config_and_exit_codes(tmp_path):
    spec = load_verify_config(SFTS / "four-rule.verify.json")
    assert spec.depth == 9 and spec.locality == 12 and len(spec.monitors) == 2
    code, rec, _ = run("verify", "--config", str(SFTS / "palindrome-2.verify.json"))
    assert code == cli.EXIT_OK and rec["verdict"] == "verified"
    cfg = tmp_path / "pass.json"
    cfg.write_text(json.dumps({"sft": str(SFTS / "aa.sft"), "strategy": "pass", "player": "B", "depth": 4,
                               "objective": "no-forbidden"}))
    code, rec, _ = run("verify", "--config", str(cfg))
    assert code == cli.EXIT_COUNTEREXAMPLE and rec["verdict"] == "counterexample"
    cfg.write_text(json.dumps({"sft": str(SFTS / "aa.sft"), "strategy": "nobody", "player": "B"}))
    assert run("verify", "--config", str(cfg))[0] == cli.EXIT_INPUT
    cfg.write_text(json.dumps({"sft": str(SFTS / "aa.sft"), "strategy": "pass"}))
    code, _, err = run("verify", "--config", str(cfg))
    assert code == cli.EXIT_INPUT and "player" in err


def test_verify_config_inline_sft():
    doc = {"sft": {"dimension": 1, "alphabet": ["a", "b"], "predicate": {"name": "marking", "which": "F2"}},
           "strategy": {"name": "four-rule"}, "player": "B", "turns": "(ABB)*", "depth": 3}
    spec = load_verify_config(json.dumps(doc))
    assert same_sft(spec.sft, marking_game("F2"))


# -- interactive play ------------------------------------------------------------

def scripted_input(lines):
    it = iter(lines)

    def read(prompt):
        try:
            return next(it)
        except StopIteration:
            raise EOFError from None
    return read


def test_play_renders_f2_line():
    out = []
    trace = cli.play_interactive(marking_game("F2"), b_four_rule_strategy(), "A", "(ABB)*",
                                 read=scripted_input(["0 a", "5 b"]), write=out.append)
    boards = [s for s in out if s.startswith("x=")]
    assert boards[0] == "x=-2..2\n....."
    assert any(line.split("\n")[1] == "..bab.." for line in boards)
    assert len(trace.plies) >= 4


def test_play_palindrome_engine_opens_at_origin():
    out = []
    trace = cli.play_interactive(palindrome_game(2), cli.named_strategy("palindrome", n=2), "B", "(AB)*",
                                 "no-pass", read=scripted_input([]), write=out.append)
    assert trace.plies[0][1] == (((0,), 0))
    assert "engine (A) plays 0:0" in out


def test_play_reprompts_on_illegal_moves():
    out = []
    sft = word_sft("ab", "aa")
    engine = ScriptedStrategy([Place((5,), 1), Place((6,), 1)])
    trace = cli.play_interactive(sft, engine, "A", "(AB)*", "no-pass",
                                 read=scripted_input(["pass", "0 z", "1 2 a", "0 a", "0 a", "1 a"]), write=out.append)
    illegal = [s for s in out if s.startswith("illegal")]
    assert len(illegal) == 4
    assert trace.winner == "A" and trace.outcome == "A-final"
    assert any("A wins at ply" in s for s in out)


def test_play_two_dimensional_render():
    text = cli.render(Pattern({(0, 0): 0, (1, 1): 1}), ["x", "y"], 2)
    lines = text.split("\n")
    assert lines[0] == "x=-2..3, y=3..-2"
    assert lines[3] == "...y.."  # y = 1
    assert lines[4] == "..x..."  # y = 0


def test_cli_play_command(monkeypatch):
    out = io.StringIO()
    feed = scripted_input(["0 a", "1 a"])
    args = cli.build_parser().parse_args(["play", "--sft", str(SFTS / "aa.sft"), "--engine", "pass"])
    code, rec = cli.cmd_play(args, read=feed, write=lambda s: out.write(s + "\n"))
    assert code == 0 and rec["winner"] == "A"
