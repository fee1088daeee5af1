"""Exhaustive, locality-bounded verification of fixed strategies, and the dovetailed A-wins prover.

The adversary may play any colour within L1 distance ``locality`` of an
existing tile, one canonical fresh cell beyond that reach (any colour), and
pass when the variant allows it.  Far-away moves only open independent
boards, so the fresh cell stands in for all of them.  Verdicts are always
relative to these parameters, which every report carries.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import PASS, IllegalMove, InputError, Pattern, Place, Sft, Variant, ball, initial_position, apply_move
from .solver_bounded import solve_omega
from .solver_finite import BudgetExceeded, solve_region
from .strategies import InvariantMonitor, ScriptedStrategy, Strategy, check_move, run_game

OBJECTIVES = ("strategy-wins", "no-forbidden", "monitor-holds")


@dataclass
class VerifySpec:
    sft: Sft
    strategy: Strategy
    player: str  # the side the strategy plays
    turns: object = "(AB)*"
    depth: int = 10
    locality: int | None = None
    objective: str = "strategy-wins"
    monitors: Sequence[InvariantMonitor] = ()
    variant: Variant | str = Variant.PASS
    adversary_colors: Sequence[int] | None = None
    node_budget: int | None = 5_000_000
    leaf_check: Callable[[Pattern], bool] | None = None
    start_index: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.player not in ("A", "B"):
            raise InputError(f"player must be A or B, got {self.player!r}")
        if self.objective not in OBJECTIVES:
            raise InputError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.depth < 0:
            raise InputError("depth must be >= 0")
        if self.objective == "strategy-wins" and self.player == "B":
            self.objective = "no-forbidden"
        if self.objective == "monitor-holds" and not self.monitors:
            raise InputError("objective monitor-holds needs at least one monitor")
        if self.locality is None:
            self.locality = 2 * self.sft.diameter() + 4
        if self.locality < 0:
            raise InputError("locality must be >= 0")
        self.variant = Variant(self.variant)
        if self.adversary_colors is None:
            self.adversary_colors = tuple(range(len(self.sft.alphabet)))

    def params(self) -> dict:
        return {"player": self.player, "depth": self.depth, "locality": self.locality, "objective": self.objective,
                "variant": self.variant.value, "turns": str(self.turns), "start_index": self.start_index}


@dataclass
class VerifyReport:
    verdict: str  # "verified", "counterexample", "inconclusive"
    nodes: int
    params: dict
    counterexample: list | None = None  # full move list, both players
    violation_ply: int | None = None
    reason: str | None = None
    frontier: int = 0  # open branches when the budget ran out

    @property
    def locality_note(self) -> str:
        return (f"adversary restricted to L1 distance {self.params['locality']} of existing tiles plus one fresh cell; "
                f"depth {self.params['depth']} plies")

    def record(self) -> dict:
        out = {"verdict": self.verdict, "nodes": self.nodes, **self.params}
        if self.counterexample is not None:
            out["violation_ply"] = self.violation_ply
            out["reason"] = self.reason
            out["counterexample"] = " ".join(_move_text(m) for m in self.counterexample)
        if self.verdict == "inconclusive":
            out["frontier"] = self.frontier
        out["locality_note"] = self.locality_note
        return out


def _move_text(move) -> str:
    if move is PASS:
        return "pass"
    return f"{','.join(map(str, move.cell))}:{move.color}"


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, spec: VerifySpec, root_branch: int | None = None):
        self.spec = spec
        self.root_branch = root_branch  # -1: stop at the first adversary node and report its width
        self.sft = spec.sft
        self.k = len(spec.sft.alphabet)
        self.nodes = 0
        self.memo: set = set()
        self.frontier = 0

    def adversary_moves(self, pattern: Pattern) -> list:
        spec = self.spec
        d = self.sft.dimension
        if not pattern:
            cells = [(0,) * d]
        else:
            near = set()
            for c in pattern:
                near.update(ball(c, spec.locality))
            cells = sorted(near - pattern.support())
            far = max(c[0] for c in pattern) + spec.locality + 1
            cells.append((far,) + (0,) * (d - 1))
        out = [Place(c, a) for c in cells for a in spec.adversary_colors]
        if spec.variant.allows_pass:
            out.append(PASS)  # last, so placements (usually the shorter refutations) are tried first
        return out

    def _monitors_fail(self, pos) -> str | None:
        for mon in self.spec.monitors:
            if mon.applies(pos.player) and not mon.holds(pos.pattern, pos.player):
                return mon.name
        return None

    def run(self, pos, strategy: Strategy, path: list) -> tuple[int, str] | None:
        """DFS; returns (violation ply, reason) for the first failing line, with ``path`` holding its moves."""
        spec = self.spec
        self.nodes += 1
        if spec.node_budget is not None and self.nodes > spec.node_budget:
            raise _Budget
        ply = len(path)
        bad = self._monitors_fail(pos)
        if bad is not None:
            return ply, f"monitor {bad}"
        if ply >= spec.depth:
            if spec.objective == "strategy-wins":
                return ply, "A did not reach a final position"
            if spec.leaf_check is not None and not spec.leaf_check(pos.pattern):
                return ply, "leaf check"
            return None
        skey = strategy.state_key()
        key = None
        if skey is not None:
            key = (pos.pattern.items_sorted, pos.turn.index, skey)
            if key in self.memo:
                return None
        if pos.player == spec.player:
            move = strategy.choose(pos)
            failed = self._follow(pos, move, strategy, path, own=True)
            if failed is not None:
                return failed
        else:
            moves = self.adversary_moves(pos.pattern)
            if self.root_branch is not None:
                if self.root_branch < 0:
                    raise _Probe(len(moves))
                moves, self.root_branch = [moves[self.root_branch]], None
            for j, move in enumerate(moves):
                branch = strategy if j == len(moves) - 1 else strategy.clone()
                try:
                    failed = self._follow(pos, move, branch, path, own=False)
                except _Budget:
                    self.frontier = len(moves) - j
                    raise
                if failed is not None:
                    return failed
        if key is not None:
            self.memo.add(key)
        return None

    def _follow(self, pos, move, strategy, path, own: bool):
        ply = len(path)
        path.append(move)
        try:
            check_move(pos, move, self.k)
            if move is PASS and not pos.variant.allows_pass:
                raise IllegalMove("pass is not allowed")
            nxt = apply_move(pos, move)
        except IllegalMove as exc:
            if own:
                return ply + 1, f"strategy played an illegal move ({exc})"
            path.pop()
            return None
        strategy.observe(pos, move)
        if move is not PASS and self.sft.touching(nxt.pattern, move.cell) is not None:
            if self.spec.objective == "strategy-wins":
                path.pop()
                return None
            return ply + 1, "forbidden pattern"
        failed = self.run(nxt, strategy, path)
        if failed is None:
            path.pop()
        return failed


def _start(spec: VerifySpec):
    return initial_position(spec.sft.dimension, spec.turns, None, spec.variant, spec.start_index)


_WORKER_SPEC: VerifySpec | None = None


class _Probe(Exception):
    def __init__(self, count: int):
        self.count = count


def _worker(branch: int):
    spec = _WORKER_SPEC
    search = _Search(spec, root_branch=branch)
    strategy = spec.strategy.clone()
    strategy.reset()
    path: list = []
    try:
        failed = search.run(_start(spec), strategy, path)
    except _Budget:
        return branch, "budget", None, search.nodes
    return branch, failed, (list(path) if failed else None), search.nodes


def exhaust(spec: VerifySpec) -> VerifyReport:
    """Explore every adversary line up to ``spec.depth`` plies against the fixed strategy."""
    if spec.workers > 1:
        return _exhaust_parallel(spec)
    search = _Search(spec)
    strategy = spec.strategy.clone()
    strategy.reset()
    path: list = []
    try:
        failed = search.run(_start(spec), strategy, path)
    except _Budget:
        return VerifyReport("inconclusive", search.nodes, spec.params(), reason="node budget exhausted",
                            frontier=search.frontier)
    if failed is None:
        return VerifyReport("verified", search.nodes, spec.params())
    ply, reason = failed
    return VerifyReport("counterexample", search.nodes, spec.params(), list(path), ply, reason)


def _exhaust_parallel(spec: VerifySpec) -> VerifyReport:
    """Split over the adversary's first choices; the earliest failing branch in enumeration order is reported."""
    global _WORKER_SPEC
    probe = _Search(spec, root_branch=-1)
    strategy = spec.strategy.clone()
    strategy.reset()
    try:
        probe.run(_start(spec), strategy, [])
    except _Probe as p:
        n = p.count
    else:
        # the line ends before the adversary moves
        return exhaust(_serial(spec))
    _WORKER_SPEC = spec
    ctx = multiprocessing.get_context("fork")
    try:
        with ProcessPoolExecutor(spec.workers, mp_context=ctx) as pool:
            results = sorted(pool.map(_worker, range(n)))
    finally:
        _WORKER_SPEC = None
    nodes = sum(r[3] for r in results)
    for branch, failed, trace, _ in results:
        if failed == "budget":
            return VerifyReport("inconclusive", nodes, spec.params(), reason="node budget exhausted",
                                frontier=n - branch)
        if failed is not None:
            return VerifyReport("counterexample", nodes, spec.params(), trace, failed[0], failed[1])
    return VerifyReport("verified", nodes, spec.params())


def _serial(spec: VerifySpec) -> VerifySpec:
    clone = VerifySpec(**{f: getattr(spec, f) for f in spec.__dataclass_fields__})
    clone.workers = 1
    return clone


def replay(spec: VerifySpec, report: VerifyReport) -> bool:
    """Rerun a counterexample through run_game and check that it fails at the reported ply."""
    if report.counterexample is None:
        raise InputError("report has no counterexample")
    moves = report.counterexample
    pos = _start(spec)
    adversary_moves = []
    for move in moves:
        if pos.player != spec.player:
            adversary_moves.append(move)
        try:
            pos = apply_move(pos, move)
        except IllegalMove:
            break
    fixed = spec.strategy.clone()
    other = ScriptedStrategy(adversary_moves)
    a, b = (fixed, other) if spec.player == "A" else (other, fixed)
    trace = run_game(spec.sft, a, b, spec.turns, report.violation_ply, spec.variant, spec.monitors,
                     start_index=spec.start_index)
    if trace.moves != moves[:len(trace.moves)]:
        return False
    if report.reason == "forbidden pattern":
        return trace.outcome == "A-final" and trace.final_ply == report.violation_ply
    if report.reason.startswith("monitor"):
        return any(p == report.violation_ply for p, _ in trace.violations)
    if report.reason.startswith("strategy played"):
        return trace.outcome == "forfeit" and trace.forfeit == spec.player
    if report.reason == "leaf check":
        return spec.leaf_check is not None and not spec.leaf_check(trace.final_pattern)
    return trace.winner == "B" and len(trace.moves) == report.violation_ply


# --------------------------------------------------------------------------
# dovetailed A-wins prover


@dataclass(frozen=True)
class Certificate:
    kind: str  # "window" or "horizon"
    parameter: int
    sft: Sft = field(compare=False, repr=False)
    turns: object = "(AB)*"
    variant: Variant = Variant.PASS
    start_index: int = 0

    def replay(self, node_limit: int | None = None) -> bool:
        if self.kind == "window":
            res = solve_region(self.sft, self.parameter, self.variant, self.turns, self.start_index,
                               exact=False, node_limit=node_limit)
            return res.winner == "A"
        return solve_omega(self.sft, self.parameter, self.turns, self.variant, self.start_index, node_limit).a_wins

    def record(self) -> dict:
        name = "n" if self.kind == "window" else "T"
        return {"certificate": self.kind, name: self.parameter, "variant": self.variant.value,
                "turns": str(self.turns)}


@dataclass
class ProofAttempt:
    certificate: Certificate | None
    tried: list  # (kind, parameter, outcome)
    nodes: int

    def record(self) -> dict:
        out = {"result": "certificate" if self.certificate else "inconclusive", "nodes": self.nodes,
               "tried": " ".join(f"{k}:{p}:{o}" for k, p, o in self.tried)}
        if self.certificate:
            out.update(self.certificate.record())
        return out


def prove_A_wins(sft: Sft, turns="(AB)*", modes: Sequence[str] = ("window", "horizon"), budget: int = 1_000_000,
                 variant: Variant | str = Variant.PASS, max_parameter: int = 16, start_index: int = 0,
                 attempt: bool = False):
    """Dovetail horizon T = 1, 2, ... with box radius n = 0, 1, ...; first certificate wins.

    Window certificates are only sound for the whole grid when passing is
    allowed, so the window mode is skipped otherwise.  ``budget`` caps the
    nodes of each single attempt; a mode that exhausts it is dropped.
    Returns a Certificate or None (``attempt=True`` returns the full log).
    """
    variant = Variant(variant)
    modes = set(modes)
    unknown = modes - {"window", "horizon"}
    if unknown:
        raise InputError(f"unknown proof modes {sorted(unknown)}")
    if not variant.allows_pass:
        modes.discard("window")
    if "horizon" in modes and not sft.all_connected():
        modes.discard("horizon")
    tried = []
    nodes = 0
    cert = None
    for i in range(1, max_parameter + 1):
        for kind, param in (("horizon", i), ("window", i - 1)):
            if kind not in modes:
                continue
            try:
                if kind == "horizon":
                    res = solve_omega(sft, param, turns, variant, start_index, budget)
                    won, used = res.a_wins, res.nodes
                else:
                    res = solve_region(sft, param, variant, turns, start_index, exact=False, node_limit=budget)
                    won, used = res.winner == "A", res.nodes
            except BudgetExceeded as exc:
                tried.append((kind, param, "budget"))
                nodes += exc.nodes
                modes.discard(kind)
                continue
            nodes += used
            tried.append((kind, param, "A" if won else "no"))
            if won:
                cert = Certificate(kind, param, sft, turns, variant, start_index)
                break
        if cert is not None or not modes:
            break
    log = ProofAttempt(cert, tried, nodes)
    return log if attempt else cert
