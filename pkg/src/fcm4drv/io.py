"""Model text format and CSV outputs.

A model file is line oriented, split into sections::

    # comments start with '#'
    [concepts]
    Law
    Students

    [edges]
    # source  weight  target
    Law ++ Students
    Students -0.5 Law
    Students pmf(0.3: 0.5, 0.6: 0.5) Law

    [init]
    Law = singleton(1)
    Students = uniform(-1, 1, 100)

    [clamps]
    Law                      # reset to its initial value
    Students = singleton(0)  # or to an explicit Drv

Concept names contain no whitespace. Weights are linguistic tokens
(``---`` ... ``+++``), plain numbers, or Drv expressions; they must lie in
``[-1, 1]``. Concepts without an ``[init]`` line start at ``singleton(0)``.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Sequence

import numpy as np

from .drv import MASS_TOL, Drv, expected_value, quantile, singleton, uniform_grid
from .engine import ZERO, FcmModel, ReasoningTrace

LINGUISTIC = {
    "---": -1.0,
    "--": -0.66,
    "-": -0.33,
    "+": 0.33,
    "++": 0.66,
    "+++": 1.0,
}

SECTIONS = ("concepts", "edges", "init", "clamps")
DEFAULT_PERCENTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


class ModelParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class MalformedLineError(ModelParseError):
    pass


class UnknownConceptError(ModelParseError):
    pass


class WeightRangeError(ModelParseError):
    pass


class PmfSumError(ModelParseError):
    pass


class DuplicateEdgeError(ModelParseError):
    pass


_CALL = re.compile(r"^(singleton|uniform|pmf)\s*\((.*)\)$")
_SECTION = re.compile(r"^\[(\w+)\]$")


def _number(text: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedLineError(f"not a number: {text!r}", lineno) from None
    if not np.isfinite(value):
        raise MalformedLineError(f"not a finite number: {text!r}", lineno)
    return value


def parse_drv(text: str, lineno: int = 0) -> Drv:
    """Parse ``singleton(c)``, ``uniform(min, max, count)``, ``pmf(v: p, ...)`` or a bare number."""
    text = text.strip()
    m = _CALL.match(text)
    if m is None:
        return singleton(_number(text, lineno))
    kind, args = m.group(1), m.group(2)
    parts = [a.strip() for a in args.split(",")] if args.strip() else []
    if kind == "singleton":
        if len(parts) != 1:
            raise MalformedLineError("singleton() takes one argument", lineno)
        return singleton(_number(parts[0], lineno))
    if kind == "uniform":
        if len(parts) != 3:
            raise MalformedLineError("uniform() takes min, max, count", lineno)
        lo, hi, count = (_number(p, lineno) for p in parts)
        try:
            return uniform_grid(lo, hi, count)
        except ValueError as exc:
            raise MalformedLineError(str(exc), lineno) from None
    values, probs = [], []
    for part in parts:
        pair = part.split(":")
        if len(pair) != 2:
            raise MalformedLineError(f"pmf entries are 'value: prob', got {part!r}", lineno)
        values.append(_number(pair[0], lineno))
        probs.append(_number(pair[1], lineno))
    if not values:
        raise MalformedLineError("pmf() needs at least one entry", lineno)
    if any(p < 0 for p in probs):
        raise MalformedLineError("pmf probabilities must be non-negative", lineno)
    total = sum(probs)
    if abs(total - 1.0) > MASS_TOL:
        raise PmfSumError(f"pmf probabilities sum to {total!r}, not 1", lineno)
    return Drv(values, probs)


def _weight(text: str, lineno: int) -> Drv:
    text = text.strip()
    w = singleton(LINGUISTIC[text]) if text in LINGUISTIC else parse_drv(text, lineno)
    if w.min < -1.0 or w.max > 1.0:
        raise WeightRangeError(f"weight {text!r} outside [-1, 1]", lineno)
    return w


def parse_model(text: str) -> FcmModel:
    concepts: list[str] = []
    edges: dict[tuple[int, int], Drv] = {}
    init: dict[int, Drv] = {}
    clamps: dict[int, Drv | None] = {}
    section = None

    def lookup(name: str, lineno: int) -> int:
        try:
            return concepts.index(name)
        except ValueError:
            raise UnknownConceptError(f"unknown concept {name!r}", lineno) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _SECTION.match(line)
        if header:
            section = header.group(1).lower()
            if section not in SECTIONS:
                raise MalformedLineError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise MalformedLineError("content before the first section header", lineno)

        if section == "concepts":
            if len(line.split()) != 1:
                raise MalformedLineError(f"concept names cannot contain spaces: {line!r}", lineno)
            if line in concepts:
                raise MalformedLineError(f"concept {line!r} declared twice", lineno)
            concepts.append(line)
        elif section == "edges":
            tokens = line.split()
            if len(tokens) < 3:
                raise MalformedLineError("edges are written 'source weight target'", lineno)
            src, dst = lookup(tokens[0], lineno), lookup(tokens[-1], lineno)
            if (dst, src) in edges:
                raise DuplicateEdgeError(f"edge {tokens[0]} -> {tokens[-1]} given twice", lineno)
            edges[dst, src] = _weight(" ".join(tokens[1:-1]), lineno)
        elif section == "init":
            name, sep, rhs = line.partition("=")
            if not sep:
                raise MalformedLineError("initial values are written 'name = drv'", lineno)
            init[lookup(name.strip(), lineno)] = parse_drv(rhs, lineno)
        else:
            name, sep, rhs = line.partition("=")
            clamps[lookup(name.strip(), lineno)] = parse_drv(rhs, lineno) if sep else None

    if not concepts:
        raise MalformedLineError("model declares no concepts")
    n = len(concepts)
    weights = [[edges.get((i, j), ZERO) for j in range(n)] for i in range(n)]
    state = [init.get(i, ZERO) for i in range(n)]
    clamp_map = {i: (d if d is not None else state[i]) for i, d in sorted(clamps.items())}
    return FcmModel(concepts, weights, state, clamp_map)


def load_model(path) -> FcmModel:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def render_drv(d: Drv) -> str:
    if d.is_singleton():
        return f"singleton({d.min!r})"
    body = ", ".join(f"{v!r}: {p!r}" for v, p in zip(d.values.tolist(), d.probs.tolist()))
    return f"pmf({body})"


def render_model(model: FcmModel) -> str:
    lines = ["[concepts]", *model.concepts, "", "[edges]"]
    for i, row in enumerate(model.weights):
        for j in model.incoming(i):
            lines.append(f"{model.concepts[j]} {render_drv(row[j])} {model.concepts[i]}")
    lines += ["", "[init]"]
    lines += [f"{c} = {render_drv(d)}" for c, d in zip(model.concepts, model.initial_state)]
    lines += ["", "[clamps]"]
    lines += [f"{model.concepts[i]} = {render_drv(d)}" for i, d in sorted(model.clamps.items())]
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _open_csv(out):
    try:
        return open(out, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def write_trace_csv(trace: ReasoningTrace, model: FcmModel, out) -> None:
    """One row per support point: ``iteration,concept,value,probability``."""
    with _open_csv(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "concept", "value", "probability"])
        for it, state in enumerate(trace.states):
            for name, d in zip(model.concepts, state):
                for v, p in zip(d.values.tolist(), d.probs.tolist()):
                    writer.writerow([it, name, _fmt(v), _fmt(p)])


def read_trace_csv(path) -> dict[tuple[int, str], Drv]:
    rows: dict[tuple[int, str], tuple[list, list]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            vals, probs = rows.setdefault((int(rec["iteration"]), rec["concept"]), ([], []))
            vals.append(float(rec["value"]))
            probs.append(float(rec["probability"]))
    return {key: Drv(v, p) for key, (v, p) in rows.items()}


def check_ranks(ranks: Sequence[float]) -> tuple[float, ...]:
    ranks = tuple(float(r) for r in ranks)
    if not ranks:
        raise ValueError("at least one percentile rank is required")
    if any(not 0.0 < r < 1.0 for r in ranks):
        raise ValueError(f"percentile ranks must lie in (0, 1), got {ranks}")
    if any(b <= a for a, b in zip(ranks, ranks[1:])):
        raise ValueError(f"percentile ranks must be strictly increasing, got {ranks}")
    return ranks


def write_percentile_csv(trace: ReasoningTrace, model: FcmModel, ranks, out) -> None:
    """Per iteration and concept: mean and the requested quantiles."""
    ranks = check_ranks(ranks)
    with _open_csv(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "concept", "mean", *(f"q{r:g}" for r in ranks)])
        for it, state in enumerate(trace.states):
            for name, d in zip(model.concepts, state):
                qs = [quantile(d, r) for r in ranks]
                writer.writerow([it, name, _fmt(expected_value(d)), *map(_fmt, qs)])
