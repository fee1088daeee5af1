"""File formats: SFT documents, verify configs and flat key-value result records.

An SFT document is JSON::

    {"dimension": 1, "alphabet": ["0", "1"],
     "forbidden": [[{"offset": [0], "color": "1"}, {"offset": [1], "color": "1"}]]}

Derived games replace ``forbidden`` with a ``predicate`` object naming the
construction (``arrow``, ``vote``, ``marking``, ``palindrome``) and its
parameters; loading rebuilds the predicate.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .core import InputError, Pattern, Sft, WindowSft


def _fail(where: str, msg: str):
    raise InputError(f"{where}: {msg}")


def _parse_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def read_document(path_or_text: str | Path) -> tuple[Any, str]:
    path = Path(path_or_text)
    text = str(path_or_text)
    if not text.lstrip().startswith("{"):
        try:
            return _parse_json(path.read_text(encoding="utf-8"), str(path)), str(path)
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
    return _parse_json(text, "<document>"), "<document>"


def sft_from_doc(doc: Any, source: str = "<document>") -> Sft:
    if not isinstance(doc, dict):
        _fail(source, "expected an object with dimension, alphabet and forbidden")
    if "predicate" in doc:
        return _derived_from_doc(doc, source)
    dim = doc.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        _fail(f"{source}: dimension", "must be a positive integer")
    alphabet = doc.get("alphabet")
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        _fail(f"{source}: alphabet", "must be a list of strings")
    forbidden = doc.get("forbidden", [])
    if not isinstance(forbidden, list):
        _fail(f"{source}: forbidden", "must be a list of patterns")
    pats = []
    for i, pat in enumerate(forbidden):
        where = f"{source}: forbidden[{i}]"
        if not isinstance(pat, list) or not pat:
            _fail(where, "must be a nonempty list of {offset, color}")
        cells = {}
        for j, entry in enumerate(pat):
            here = f"{where}[{j}]"
            if not isinstance(entry, dict):
                _fail(here, "must be an object with offset and color")
            off = entry.get("offset")
            if not isinstance(off, list) or len(off) != dim or not all(isinstance(x, int) for x in off):
                _fail(f"{here}.offset", f"must be a list of {dim} integers")
            color = entry.get("color")
            if color not in alphabet:
                _fail(f"{here}.color", f"unknown colour {color!r}")
            if tuple(off) in cells:
                _fail(f"{here}.offset", f"duplicate cell {off}")
            cells[tuple(off)] = alphabet.index(color)
        pats.append(Pattern(cells))
    try:
        return Sft(dim, alphabet, pats)
    except InputError as exc:
        _fail(source, str(exc))


def _derived_from_doc(doc: dict, source: str) -> Sft:
    from .reductions import build_arrow_game, build_vote_game, linewise, marking_game
    from .strategies import game_1234, palindrome_game

    pred = doc["predicate"]
    if not isinstance(pred, dict) or "name" not in pred:
        _fail(f"{source}: predicate", "must be an object with a name")
    name = pred["name"]
    try:
        if name == "arrow":
            game = build_arrow_game(sft_from_doc(_base_doc(pred, source), f"{source}: predicate.base"))
        elif name == "vote":
            base = sft_from_doc(_base_doc(pred, source), f"{source}: predicate.base")
            game = build_vote_game(base, int(pred.get("width", 11)), int(pred.get("threshold", 4)),
                                   pred.get("mode", "set"))
        elif name == "marking":
            return marking_game(pred.get("which", "F2"))
        elif name == "palindrome":
            return palindrome_game(int(pred.get("n", 1)))
        elif name == "1234":
            return game_1234()
        else:
            _fail(f"{source}: predicate.name", f"unknown construction {name!r}")
    except (TypeError, ValueError) as exc:
        _fail(f"{source}: predicate", str(exc))
    dim = pred.get("dimension", doc.get("dimension", 1))
    return linewise(game, dim) if dim != 1 else game


def _base_doc(pred: dict, source: str) -> dict:
    base = pred.get("base")
    if not isinstance(base, dict):
        _fail(f"{source}: predicate.base", "missing base SFT")
    return {"dimension": 1, **base}


def load_sft(path_or_text: str | Path) -> Sft:
    doc, source = read_document(path_or_text)
    return sft_from_doc(doc, source)


def sft_to_doc(sft: Sft) -> dict:
    if isinstance(sft, WindowSft):
        construction = dict(sft.construction)
        return {"dimension": sft.dimension, "alphabet": list(sft.alphabet), "window": sft.window,
                "predicate": construction}
    return {
        "dimension": sft.dimension,
        "alphabet": list(sft.alphabet),
        "forbidden": [[{"offset": list(c), "color": sft.alphabet[a]} for c, a in p.items_sorted]
                      for p in sft.forbidden],
    }


def dump_sft(sft: Sft) -> str:
    return json.dumps(sft_to_doc(sft), indent=1)


def save_sft(sft: Sft, path: str | Path) -> None:
    Path(path).write_text(dump_sft(sft) + "\n", encoding="utf-8")


def same_sft(a: Sft, b: Sft) -> bool:
    """Structural equality through the document form (forbidden patterns compared as sets)."""
    da, db = sft_to_doc(a), sft_to_doc(b)
    if "forbidden" in da and "forbidden" in db:
        key = lambda d: (d["dimension"], d["alphabet"], sorted(json.dumps(p, sort_keys=True) for p in d["forbidden"]))
        return key(da) == key(db)
    return da == db


# --------------------------------------------------------------------------
# records


def format_record(record: dict) -> str:
    lines = []
    for key, value in record.items():
        if isinstance(value, bool):
            value = str(value).lower()
        elif value is None:
            value = "-"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def parse_record(text: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise InputError(f"record line {n}: expected 'key = value'")
        out[key.strip()] = value.strip()
    return out


def record_json(record: dict) -> str:
    return json.dumps(record, indent=1, default=str)


# --------------------------------------------------------------------------
# verify configs


def load_verify_config(path_or_text: str | Path, base_dir: Path | None = None):
    """Build a VerifySpec from a JSON config.

    Keys: sft (path or inline document), strategy {name, ...params}, player,
    turns, depth, locality, objective, monitors (names), variant,
    adversary_colors, node_budget, start_index, workers.
    """
    from .strategies import named_monitor, named_strategy
    from .verifier import VerifySpec

    doc, source = read_document(path_or_text)
    if not isinstance(doc, dict):
        _fail(source, "expected an object")
    if base_dir is None and source != "<document>":
        base_dir = Path(source).parent
    sft_ref = doc.get("sft")
    if isinstance(sft_ref, dict):
        sft = sft_from_doc(sft_ref, f"{source}: sft")
    elif isinstance(sft_ref, str):
        path = Path(sft_ref)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        sft = load_sft(path)
    else:
        _fail(f"{source}: sft", "must be a path or an SFT document")
    strat = doc.get("strategy")
    if isinstance(strat, str):
        strat = {"name": strat}
    if not isinstance(strat, dict) or "name" not in strat:
        _fail(f"{source}: strategy", "must name a strategy")
    params = {k: v for k, v in strat.items() if k != "name"}
    strategy = named_strategy(strat["name"], sft, **params)
    monitors = [named_monitor(m, sft, params.get("witness")) for m in doc.get("monitors", [])]
    fields = {k: doc[k] for k in ("player", "turns", "depth", "locality", "objective", "variant",
                                  "adversary_colors", "node_budget", "start_index", "workers") if k in doc}
    if "player" not in fields:
        _fail(f"{source}: player", "missing (A or B)")
    try:
        return VerifySpec(sft=sft, strategy=strategy, monitors=monitors, **fields)
    except TypeError as exc:
        _fail(source, str(exc))
