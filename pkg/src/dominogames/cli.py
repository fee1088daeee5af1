"""Command-line interface.

Every command prints a flat ``key = value`` record (or JSON with ``--json``)
and exits with 0 when it computed an answer, 1 when the result is
inconclusive, 2 on input errors and 3 when ``verify`` finds a counterexample.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .core import PASS, DominoError, IllegalMove, InputError, Place, Region, Variant, apply_move, initial_position
from .formats import format_record, load_sft, load_verify_config, record_json, save_sft, sft_to_doc
from .solver_bounded import OmegaSolver, smallest_horizon
from .solver_finite import BudgetExceeded, RegionSolver
from .strategies import (GameTrace, Strategy, TableStrategy, check_move, named_monitor, named_strategy, run_game)
from .words import budget_sequence, classify, frequency, is_balanced_up_to, parse_word, v

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3
BUDGET_ENV = "DOMINO_NODE_BUDGET"


def parse_count(text: str) -> int:
    """Integers written as 1000000, 1_000_000, 10^6 or 1e6."""
    s = str(text).strip().replace("_", "")
    try:
        if "^" in s:
            base, exp = s.split("^", 1)
            return int(base) ** int(exp)
        if "e" in s.lower():
            value = float(s)
            if value != int(value):
                raise ValueError
            return int(value)
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}") from None


def default_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return None
    try:
        return parse_count(raw)
    except argparse.ArgumentTypeError:
        raise InputError(f"{BUDGET_ENV}={raw!r} is not a count") from None


def _params(items: list[str] | None) -> dict[str, str]:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"parameter {item!r} is not key=value")
        out[key.strip()] = value.strip()
    return out


# --------------------------------------------------------------------------
# commands


def cmd_solve_finite(args) -> tuple[int, dict]:
    sft = load_sft(args.sft)
    turns = parse_word(args.turns)
    budget = args.budget if args.budget is not None else default_budget()
    rec = {"command": "solve-finite", "sft": args.sft, "turns": str(turns), "variant": args.variant, "n": args.n}
    solver = RegionSolver(sft, args.n, args.variant, turns, args.start, node_limit=budget)
    t0 = time.perf_counter()
    try:
        res = solver.solve()
    except BudgetExceeded as exc:
        rec.update(result="inconclusive", reason=str(exc), nodes=exc.nodes)
        return EXIT_INCONCLUSIVE, rec
    rec.update(res.record())
    rec["principal_line"] = " ".join(_move_text(m) for m in res.principal_line) or "-"
    rec["seconds"] = round(time.perf_counter() - t0, 3)
    return EXIT_OK, rec


def cmd_solve_bounded(args) -> tuple[int, dict]:
    sft = load_sft(args.sft)
    turns = parse_word(args.turns)
    budget = args.budget if args.budget is not None else default_budget()
    rec = {"command": "solve-bounded", "sft": args.sft, "turns": str(turns), "variant": args.variant}
    t0 = time.perf_counter()
    try:
        if args.smallest:
            T = smallest_horizon(sft, turns, args.variant, args.T, args.start, budget)
            rec.update(T_max=args.T, smallest_T=T if T is not None else "none")
            rec["seconds"] = round(time.perf_counter() - t0, 3)
            return (EXIT_OK if T is not None else EXIT_INCONCLUSIVE), rec
        res = OmegaSolver(sft, args.T, turns, args.variant, args.start, budget).solve()
    except BudgetExceeded as exc:
        rec.update(result="inconclusive", reason=str(exc), nodes=exc.nodes)
        return EXIT_INCONCLUSIVE, rec
    rec.update(res.record())
    rec["seconds"] = round(time.perf_counter() - t0, 3)
    return EXIT_OK, rec


def cmd_prove(args) -> tuple[int, dict]:
    from .verifier import prove_A_wins

    sft = load_sft(args.sft)
    turns = parse_word(args.turns)
    budget = args.budget if args.budget is not None else (default_budget() or 1_000_000)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    t0 = time.perf_counter()
    log = prove_A_wins(sft, turns, modes, budget, args.variant, args.max_parameter, args.start, attempt=True)
    rec = {"command": "prove", "sft": args.sft, "turns": str(turns), "variant": args.variant, "budget": budget}
    rec.update(log.record())
    rec["seconds"] = round(time.perf_counter() - t0, 3)
    return (EXIT_OK if log.certificate else EXIT_INCONCLUSIVE), rec


def cmd_reduce(args) -> tuple[int, dict]:
    from .reductions import build_arrow_game, build_vote_game, linewise

    base = load_sft(args.sft)
    if args.construction == "arrow":
        game = build_arrow_game(base)
    else:
        game = build_vote_game(base, args.width, args.threshold, args.mode)
    if args.dimension != 1:
        game = linewise(game, args.dimension)
    rec = {"command": "reduce", "sft": args.sft, "construction": args.construction,
           "alphabet_size": len(game.alphabet), "window": game.window, "dimension": game.dimension}
    if args.out:
        save_sft(game, args.out)
        rec["out"] = args.out
    else:
        rec["document"] = json.dumps(sft_to_doc(game), separators=(",", ":"))
    return EXIT_OK, rec


def cmd_word(args) -> tuple[int, dict]:
    rec: dict = {"command": "word"}
    if args.word is not None:
        word = parse_word(args.word)
        rec.update(word=str(word), prefix=word.prefix(args.prefix))
        if args.classify:
            case = classify(word, args.scan_depth)
            rec.update(tag=case.tag.value, frequency=str(case.frequency), occurrences=case.occurrences,
                       gap_k=case.gap_k if case.gap_k is not None else "-", decidable=case.tag.decidable,
                       scan_depth=case.scan_depth)
        if args.frequency:
            rec["frequency"] = str(frequency(word))
        if args.balanced is not None:
            rec["balanced_to"] = args.balanced
            rec["balanced"] = is_balanced_up_to(word, args.balanced)
    if args.v:
        n, c, k = args.v
        rec["v"] = v(n, c, k)
    if args.budget:
        try:
            f = Fraction(args.budget)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"--budget: not a fraction: {args.budget!r}") from None
        seq = budget_sequence(f, args.steps)
        rec["f"] = str(f)
        rec["plays"] = " ".join(str(p) for _, p in seq)
        rec["budgets"] = " ".join(str(b) for b, _ in seq)
    if len(rec) == 1:
        raise InputError("word: give a turn word, --v or --budget")
    return EXIT_OK, rec


def _strategy_for(name: str, params: dict, sft, turns, variant, player: str,
                  region_n: int | None) -> tuple[Strategy, Region | None]:
    """A named strategy, or ``table``: the solved strategy on the box of radius ``region_n``."""
    if name == "table":
        if region_n is None:
            raise InputError("the table engine needs --n (box radius)")
        solver = RegionSolver(sft, region_n, variant, turns)
        return TableStrategy(solver.extract_strategy(player)), solver.region
    return named_strategy(name, sft, **params), None


def cmd_run(args) -> tuple[int, dict]:
    sft = load_sft(args.sft)
    turns = parse_word(args.turns)
    a, region_a = _strategy_for(args.a, _params(args.a_param), sft, turns, args.variant, "A", args.n)
    b, region_b = _strategy_for(args.b, _params(args.b_param), sft, turns, args.variant, "B", args.n)
    params = {**_params(args.a_param), **_params(args.b_param)}
    monitors = [named_monitor(m, sft, params.get("witness")) for m in args.monitor or []]
    trace = run_game(sft, a, b, turns, args.max_plies, args.variant, monitors, region_a or region_b, args.start)
    rec = {"command": "run", "sft": args.sft, "turns": str(turns), "variant": args.variant, "a": args.a, "b": args.b,
           "outcome": trace.outcome, "winner": trace.winner, "final_ply": trace.final_ply or len(trace.plies),
           "violations": " ".join(f"{p}:{n}" for p, n in trace.violations) or "-",
           "moves": " ".join(_move_text(m) for m in trace.moves) or "-"}
    return EXIT_OK, rec


def cmd_verify(args) -> tuple[int, dict]:
    from .verifier import exhaust

    spec = load_verify_config(args.config)
    if args.workers:
        spec.workers = args.workers
    t0 = time.perf_counter()
    report = exhaust(spec)
    rec = {"command": "verify", "config": args.config}
    rec.update(report.record())
    rec["seconds"] = round(time.perf_counter() - t0, 3)
    code = {"verified": EXIT_OK, "inconclusive": EXIT_INCONCLUSIVE, "counterexample": EXIT_COUNTEREXAMPLE}
    return code[report.verdict], rec


# --------------------------------------------------------------------------
# interactive play


def glyphs(alphabet) -> list[str]:
    """One character per colour: the names themselves when they are distinct single characters."""
    if all(len(a) == 1 for a in alphabet) and len(set(alphabet)) == len(alphabet) and "." not in alphabet:
        return list(alphabet)
    digits = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return [digits[i] if i < len(digits) else "?" for i in range(len(alphabet))]


def render(pattern, alphabet, dimension: int, margin: int = 2) -> str:
    g = glyphs(alphabet)
    if not pattern:
        xs, ys = [0], [0]
    else:
        xs = [c[0] for c in pattern]
        ys = [c[1] for c in pattern] if dimension > 1 else [0]
    x0, x1 = min(xs) - margin, max(xs) + margin
    if dimension == 1:
        row = "".join(g[pattern[(x,)]] if (x,) in pattern else "." for x in range(x0, x1 + 1))
        return f"x={x0}..{x1}\n{row}"
    if dimension != 2:
        return " ".join(f"{c}:{g[a]}" for c, a in pattern.items_sorted) or "(empty)"
    y0, y1 = min(ys) - margin, max(ys) + margin
    lines = [f"x={x0}..{x1}, y={y1}..{y0}"]
    for y in range(y1, y0 - 1, -1):
        lines.append("".join(g[pattern[(x, y)]] if (x, y) in pattern else "." for x in range(x0, x1 + 1)))
    return "\n".join(lines)


def parse_move(text: str, sft, variant: Variant):
    """``pass`` or ``x [y ...] colour`` (colour by name or index)."""
    parts = text.split()
    if not parts:
        raise InputError("empty move")
    if parts[0].lower() == "pass" and len(parts) == 1:
        if not variant.allows_pass:
            raise InputError("passing is not allowed in this variant")
        return PASS
    if len(parts) != sft.dimension + 1:
        raise InputError(f"expected {sft.dimension} coordinate(s) and a colour, or 'pass'")
    try:
        cell = tuple(int(x) for x in parts[:-1])
    except ValueError:
        raise InputError(f"bad coordinates in {text!r}") from None
    name = parts[-1]
    if name in sft.alphabet:
        color = sft.alphabet.index(name)
    elif name in glyphs(sft.alphabet):
        color = glyphs(sft.alphabet).index(name)
    elif name.isdigit() and int(name) < len(sft.alphabet):
        color = int(name)
    else:
        raise InputError(f"unknown colour {name!r}")
    return Place(cell, color)


def play_interactive(sft, engine: Strategy, human: str = "A", turns="(AB)*", variant: Variant | str = Variant.PASS,
                     max_plies: int = 200, read: Callable[[str], str] = input,
                     write: Callable[[str], None] = print, region: Region | None = None,
                     start_index: int = 0) -> GameTrace:
    """Human against an engine strategy; an illegal human move re-prompts without changing the game."""
    variant = Variant(variant)
    pos = initial_position(sft.dimension, turns, region, variant, start_index)
    engine.reset()
    trace = GameTrace()
    for ply in range(max_plies):
        write(render(pos.pattern, sft.alphabet, sft.dimension))
        if pos.player == human:
            while True:
                try:
                    line = read(f"ply {ply} ({human}) move> ")
                except EOFError:
                    write("input closed; game stopped")
                    trace.final_pattern = pos.pattern
                    return trace
                try:
                    move = parse_move(line, sft, variant)
                    check_move(pos, move, len(sft.alphabet))
                    nxt = apply_move(pos, move)
                    break
                except (InputError, IllegalMove) as exc:
                    write(f"illegal: {exc}")
        else:
            move = engine.choose(pos)
            try:
                check_move(pos, move, len(sft.alphabet))
                nxt = apply_move(pos, move)
            except IllegalMove as exc:
                write(f"engine played an illegal move ({exc}); {human} wins")
                trace.plies.append((pos, move))
                trace.outcome, trace.forfeit, trace.final_ply = "forfeit", pos.player, ply + 1
                trace.final_pattern = pos.pattern
                return trace
            write(f"engine ({pos.player}) plays {_move_text(move)}")
        trace.plies.append((pos, move))
        engine.observe(pos, move)
        pos = nxt
        if move is not PASS:
            w = sft.touching(pos.pattern, move.cell)
            if w is not None:
                write(render(pos.pattern, sft.alphabet, sft.dimension))
                write(f"A wins at ply {ply + 1}: forbidden pattern {w.index} placed at {w.translation}")
                trace.outcome, trace.final_ply, trace.witness = "A-final", ply + 1, w
                trace.final_pattern = pos.pattern
                return trace
    write(f"B survived {max_plies} plies")
    trace.final_pattern = pos.pattern
    return trace


def cmd_play(args, read=input, write=print) -> tuple[int, dict]:
    sft = load_sft(args.sft)
    turns = parse_word(args.turns)
    engine_side = "B" if args.human == "A" else "A"
    engine, region = _strategy_for(args.engine, _params(args.engine_param), sft, turns, args.variant,
                                   engine_side, args.n)
    trace = play_interactive(sft, engine, args.human, turns, args.variant, args.max_plies, read, write, region,
                             args.start)
    rec = {"command": "play", "human": args.human, "engine": args.engine, "outcome": trace.outcome,
           "winner": trace.winner, "plies": len(trace.plies)}
    return EXIT_OK, rec


# --------------------------------------------------------------------------
# argument parsing


def _move_text(move) -> str:
    if move is PASS:
        return "pass"
    return f"{','.join(map(str, move.cell))}:{move.color}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dominogames", description="Solve, verify and play Domino games.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sft=True):
        if sft:
            sp.add_argument("--sft", required=True, help="SFT document (JSON)")
        sp.add_argument("--turns", default="(AB)*", help="turn word, e.g. '(AB)*', 'B|(AB)*', 's2'")
        sp.add_argument("--variant", choices=[v.value for v in Variant], default="pass")
        sp.add_argument("--start", type=int, default=0, help="index of the first turn")
        sp.add_argument("--json", action="store_true", help="emit JSON instead of key = value lines")
        sp.add_argument("--out-record", help="also write the record to this file")

    sp = sub.add_parser("solve-finite", help="exact solve on the box [-n, n]^d")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=parse_count)
    sp.set_defaults(func=cmd_solve_finite)

    sp = sub.add_parser("solve-bounded", help="does A win within T moves")
    common(sp)
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--smallest", action="store_true", help="search the smallest T up to --T")
    sp.add_argument("--budget", type=parse_count)
    sp.set_defaults(func=cmd_solve_bounded)

    sp = sub.add_parser("prove", help="dovetailed search for a certificate that A wins")
    common(sp)
    sp.add_argument("--budget", type=parse_count)
    sp.add_argument("--modes", default="window,horizon")
    sp.add_argument("--max-parameter", type=int, default=16)
    sp.set_defaults(func=cmd_prove)

    sp = sub.add_parser("reduce", help="build a derived game from a 1D base SFT")
    sp.add_argument("--sft", required=True)
    sp.add_argument("--construction", choices=["arrow", "vote"], default="arrow")
    sp.add_argument("--width", type=int, default=11)
    sp.add_argument("--threshold", type=int, default=4)
    sp.add_argument("--mode", choices=["set", "majority"], default="set")
    sp.add_argument("--dimension", type=int, default=1)
    sp.add_argument("--out", help="write the derived SFT document here")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out-record")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("word", help="turn-word analysis, isolation turn counts and budget sequences")
    sp.add_argument("word", nargs="?", help="turn word")
    sp.add_argument("--classify", metavar="WORD", nargs="?", const=True)
    sp.add_argument("--frequency", action="store_true")
    sp.add_argument("--balanced", type=int, metavar="N")
    sp.add_argument("--prefix", type=int, default=24)
    sp.add_argument("--scan-depth", type=int)
    sp.add_argument("--v", type=int, nargs=3, metavar=("N", "C", "K"), help="isolation turn count v(n, c, k)")
    sp.add_argument("--budget", metavar="F", help="budget sequence for A's frequency F, e.g. 1/2")
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out-record")
    sp.set_defaults(func=cmd_word)

    sp = sub.add_parser("run", help="strategy against strategy")
    common(sp)
    sp.add_argument("--a", required=True, help="strategy for A (named, or 'table')")
    sp.add_argument("--b", required=True, help="strategy for B (named, or 'table')")
    sp.add_argument("--a-param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--b-param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--n", type=int, help="box radius for table strategies")
    sp.add_argument("--monitor", action="append", help="invariant monitor name")
    sp.add_argument("--max-plies", type=int, default=100)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("play", help="play against an engine in the terminal")
    common(sp)
    sp.add_argument("--human", choices=["A", "B"], default="A")
    sp.add_argument("--engine", required=True, help="named strategy or 'table'")
    sp.add_argument("--engine-param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--n", type=int, help="box radius for the table engine")
    sp.add_argument("--max-plies", type=int, default=200)
    sp.set_defaults(func=cmd_play)

    sp = sub.add_parser("verify", help="exhaustive verification from a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out-record")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "word":
        if isinstance(args.classify, str):
            args.word, args.classify = args.classify, True
    try:
        code, rec = args.func(args)
    except (InputError, DominoError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    text = record_json(rec) + "\n" if args.json else format_record(rec)
    out.write(text)
    if getattr(args, "out_record", None):
        Path(args.out_record).write_text(text, encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
