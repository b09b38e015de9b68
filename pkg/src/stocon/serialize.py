"""JSON file formats: automata, partitions, triples, distributions, words, streams.

Parsers raise :class:`MalformedInput` with a message that names the file
location (``path:line:col`` for syntax errors, a field path otherwise).
Writers emit canonical JSON: space order everywhere, rationals as
``"num/den"``, two-space indentation and a trailing newline.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .congruence import CongruenceTriple, FriendshipReport
from .core import (
    FiniteSpace,
    Morphism,
    ProductSpace,
    StochasticAutomaton,
    SubDistribution,
    format_fraction,
    validate_automaton,
)
from .errors import MalformedInput
from .partition import Partition
from .streams import PrefixTree, StreamPresentation

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def load_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInput(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_rational(text, where: str) -> Fraction:
    if not isinstance(text, str):
        raise MalformedInput(f"{where}: rational must be a string like \"1/2\", got {text!r}")
    m = _RATIONAL.match(text)
    if not m:
        raise MalformedInput(f"{where}: not a rational: {text!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise MalformedInput(f"{where}: zero denominator in {text!r}")
    return Fraction(num, den)


def _expect(obj, kind, where: str):
    if not isinstance(obj, kind):
        name = {dict: "an object", list: "an array", str: "a string"}.get(kind, kind.__name__)
        raise MalformedInput(f"{where}: expected {name}")
    return obj


def _labels(obj, where: str) -> list[str]:
    items = _expect(obj, list, where)
    for i, e in enumerate(items):
        _expect(e, str, f"{where}[{i}]")
    seen = set()
    for e in items:
        if e in seen:
            raise MalformedInput(f"{where}: duplicate label {e!r}")
        seen.add(e)
    if not items:
        raise MalformedInput(f"{where}: empty label list")
    return items


def _label_in(label, space, where: str):
    if label not in space:
        raise MalformedInput(f"{where}: unknown-label {label!r} (not in {space.name})")
    return label


# -- automata -------------------------------------------------------------


def automaton_from_obj(obj, strict: bool = True, where: str = "automaton") -> StochasticAutomaton:
    """Build an automaton; with ``strict`` the result must also validate."""
    _expect(obj, dict, where)
    for key in ("inputs", "outputs", "states", "law"):
        if key not in obj:
            raise MalformedInput(f"{where}: missing key {key!r}")
    X = FiniteSpace("inputs", _labels(obj["inputs"], f"{where}.inputs"))
    Y = FiniteSpace("outputs", _labels(obj["outputs"], f"{where}.outputs"))
    Z = FiniteSpace("states", _labels(obj["states"], f"{where}.states"))
    nxt = ProductSpace((Z, Y))
    law = {}
    for i, row in enumerate(_expect(obj["law"], list, f"{where}.law")):
        rw = f"{where}.law[{i}]"
        _expect(row, dict, rw)
        for key in ("input", "state", "moves"):
            if key not in row:
                raise MalformedInput(f"{rw}: missing key {key!r}")
        x = _label_in(row["input"], X, f"{rw}.input")
        z = _label_in(row["state"], Z, f"{rw}.state")
        if (x, z) in law:
            raise MalformedInput(f"{rw}: duplicate row for ({x},{z})")
        weights = {}
        for j, mv in enumerate(_expect(row["moves"], list, f"{rw}.moves")):
            mw = f"{rw}.moves[{j}]"
            _expect(mv, dict, mw)
            for key in ("next", "out", "p"):
                if key not in mv:
                    raise MalformedInput(f"{mw}: missing key {key!r}")
            cell = (_label_in(mv["next"], Z, f"{mw}.next"), _label_in(mv["out"], Y, f"{mw}.out"))
            if cell in weights:
                raise MalformedInput(f"{mw}: duplicate move to (next={cell[0]}, out={cell[1]})")
            p = parse_rational(mv["p"], f"{mw}.p")
            if strict and p < 0:
                raise MalformedInput(f"{mw}.p: negative-weight {mv['p']}")
            weights[cell] = p
        law[(x, z)] = SubDistribution(nxt, weights)
    a = StochasticAutomaton(X, Y, Z, law)
    if strict:
        problems = validate_automaton(a)
        if problems:
            raise MalformedInput(f"{where}: " + "; ".join(map(str, problems)))
    return a


def parse_automaton(path, strict: bool = True) -> StochasticAutomaton:
    return automaton_from_obj(load_json(path), strict=strict, where=str(path))


def automaton_to_obj(a: StochasticAutomaton, classes: Mapping | None = None) -> dict:
    law = []
    for x in a.inputs:
        for z in a.states:
            if (x, z) not in a.law:
                continue
            moves = [{"next": z2, "out": y, "p": format_fraction(p)} for (z2, y), p in a.row(x, z).items()]
            law.append({"input": x, "state": z, "moves": moves})
    obj = {
        "inputs": list(a.inputs),
        "outputs": list(a.outputs),
        "states": list(a.states),
        "law": law,
    }
    if classes is not None:
        obj["classes"] = {
            comp: {label: list(members) for label, members in parts.items()} for comp, parts in classes.items()
        }
    return obj


# -- partitions and triples -------------------------------------------------


def spaces_of(a: StochasticAutomaton) -> dict:
    return {"inputs": a.inputs, "outputs": a.outputs, "states": a.states}


def partition_from_obj(obj, spaces: Mapping, where: str = "partition", space: str | None = None) -> Partition:
    _expect(obj, dict, where)
    name = obj.get("space", space)
    if name not in spaces:
        raise MalformedInput(f"{where}.space: unknown space {name!r}; expected one of {sorted(spaces)}")
    if space is not None and name != space:
        raise MalformedInput(f"{where}.space: expected {space!r}, got {name!r}")
    sp = spaces[name]
    blocks = _expect(obj.get("blocks"), list, f"{where}.blocks")
    for i, b in enumerate(blocks):
        for j, e in enumerate(_expect(b, list, f"{where}.blocks[{i}]")):
            _label_in(e, sp, f"{where}.blocks[{i}][{j}]")
    try:
        return Partition(sp, blocks)
    except MalformedInput as exc:
        raise MalformedInput(f"{where}: {exc}") from None


def partition_to_obj(p: Partition) -> dict:
    return {"space": p.space.name, "blocks": [list(b) for b in p.blocks]}


def triple_from_obj(obj, a: StochasticAutomaton, where: str = "triple") -> CongruenceTriple:
    _expect(obj, dict, where)
    sp = spaces_of(a)
    parts = []
    for key, space in (("alpha", "inputs"), ("beta", "outputs"), ("gamma", "states")):
        if key not in obj:
            raise MalformedInput(f"{where}: missing key {key!r}")
        parts.append(partition_from_obj(obj[key], sp, f"{where}.{key}", space))
    return CongruenceTriple(*parts)


def parse_triple(path, a: StochasticAutomaton) -> CongruenceTriple:
    return triple_from_obj(load_json(path), a, str(path))


def parse_partition(path, spaces: Mapping, space: str | None = None) -> Partition:
    return partition_from_obj(load_json(path), spaces, str(path), space)


def triple_to_obj(c: CongruenceTriple) -> dict:
    return {"alpha": partition_to_obj(c.alpha), "beta": partition_to_obj(c.beta), "gamma": partition_to_obj(c.gamma)}


# -- distributions, relations, morphisms --------------------------------------


def distribution_from_obj(obj, space, where: str = "distribution") -> SubDistribution:
    _expect(obj, dict, where)
    weights = {}
    for label, p in obj.items():
        _label_in(label, space, f"{where}.{label}")
        q = parse_rational(p, f"{where}.{label}")
        if q < 0:
            raise MalformedInput(f"{where}.{label}: negative-weight {p}")
        weights[label] = q
    d = SubDistribution(space, weights)
    if d.mass > 1:
        raise MalformedInput(f"{where}: mass-exceeds-one ({format_fraction(d.mass)})")
    return d


def parse_distribution(path, space) -> SubDistribution:
    return distribution_from_obj(load_json(path), space, str(path))


def distribution_to_obj(d: SubDistribution) -> dict:
    return {label_key(e): format_fraction(p) for e, p in d.items()}


def relation_from_obj(obj, where: str = "relation") -> tuple[dict, FiniteSpace, FiniteSpace]:
    """``{"domain": [...], "codomain": [...], "rows": {x: {h: "p"}}}``; missing rows are empty."""
    _expect(obj, dict, where)
    F = FiniteSpace("domain", _labels(obj.get("domain"), f"{where}.domain"))
    H = FiniteSpace("codomain", _labels(obj.get("codomain"), f"{where}.codomain"))
    raw = _expect(obj.get("rows", {}), dict, f"{where}.rows")
    for label in raw:
        _label_in(label, F, f"{where}.rows.{label}")
    rows = {x: distribution_from_obj(raw.get(x, {}), H, f"{where}.rows.{x}") for x in F}
    return rows, F, H


def parse_relation(path):
    return relation_from_obj(load_json(path), str(path))


def morphism_from_obj(obj, src: StochasticAutomaton, tgt: StochasticAutomaton, where: str = "morphism") -> Morphism:
    _expect(obj, dict, where)
    maps = []
    for key, s, t in (("f", src.inputs, tgt.inputs), ("g", src.outputs, tgt.outputs), ("h", src.states, tgt.states)):
        m = _expect(obj.get(key), dict, f"{where}.{key}")
        for e, v in m.items():
            _label_in(e, s, f"{where}.{key}")
            _label_in(v, t, f"{where}.{key}.{e}")
        maps.append(dict(m))
    return Morphism(src, tgt, *maps)


def morphism_to_obj(m: Morphism) -> dict:
    return {
        "f": {x: m.f[x] for x in m.source.inputs},
        "g": {y: m.g[y] for y in m.source.outputs},
        "h": {z: m.h[z] for z in m.source.states},
    }


# -- words, streams, trees ------------------------------------------------------


def parse_word(obj, space, where: str = "word") -> tuple:
    """A word is a JSON array of labels, or a plain string of one-character labels."""
    if isinstance(obj, str):
        text = obj.strip()
        if text.startswith("["):
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise MalformedInput(f"{where}: {exc.msg}") from None
        else:
            if not all(len(e) == 1 for e in space):
                raise MalformedInput(f"{where}: labels of {space.name} are not single characters; use a JSON array")
            obj = list(text)
    items = _expect(obj, list, where)
    return tuple(_label_in(e, space, f"{where}[{i}]") for i, e in enumerate(items))


def format_word(w: tuple) -> str | list:
    if all(isinstance(e, str) and len(e) == 1 for e in w):
        return "".join(w)
    return list(w)


def label_key(e) -> str:
    """A string key for labels that may be words or pairs."""
    if isinstance(e, tuple):
        f = format_word(e)
        return f if isinstance(f, str) else json.dumps(f, ensure_ascii=False)
    return str(e)


def parse_word_set(obj, space, n: int | None = None, where: str = "set") -> list[tuple]:
    if isinstance(obj, str) and obj.strip().startswith("["):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{where}: {exc.msg}") from None
    items = _expect(obj, list, where)
    words = [parse_word(w, space, f"{where}[{i}]") for i, w in enumerate(items)]
    if n is not None:
        for i, w in enumerate(words):
            if len(w) != n:
                raise MalformedInput(f"{where}[{i}]: word {format_word(w)!r} does not have length {n}")
    return words


def stream_from_obj(obj, space, where: str = "stream") -> StreamPresentation:
    _expect(obj, dict, where)
    prefix = parse_word(obj.get("prefix", []), space, f"{where}.prefix")
    period = parse_word(obj.get("period", []), space, f"{where}.period")
    try:
        return StreamPresentation(prefix, period)
    except MalformedInput as exc:
        raise MalformedInput(f"{where}: {exc}") from None


def stream_to_obj(s: StreamPresentation) -> dict:
    return {"prefix": list(s.prefix), "period": list(s.period)}


def tree_from_obj(obj, space, where: str = "tree") -> PrefixTree:
    if isinstance(obj, dict):
        obj = obj.get("paths")
    paths = _expect(obj, list, f"{where}.paths")
    streams = []
    for i, p in enumerate(paths):
        if isinstance(p, dict):
            streams.append(stream_from_obj(p, space, f"{where}.paths[{i}]"))
        else:
            streams.append(StreamPresentation(parse_word(p, space, f"{where}.paths[{i}]")))
    try:
        return PrefixTree(streams)
    except MalformedInput as exc:
        raise MalformedInput(f"{where}: {exc}") from None


# -- reports --------------------------------------------------------------------


def jsonable(e):
    if isinstance(e, tuple):
        return [jsonable(c) for c in e]
    if isinstance(e, Fraction):
        return format_fraction(e)
    return e


def friendship_to_obj(r: FriendshipReport) -> dict:
    w = r.witness
    witness = None
    if w is not None:
        witness = {
            "first": jsonable(w.first),
            "second": jsonable(w.second),
            "block": [jsonable(e) for e in w.block],
            "first_mass": format_fraction(w.first_mass),
            "second_mass": format_fraction(w.second_mass),
        }
    return {"friendly": r.friendly, "witness": witness}
