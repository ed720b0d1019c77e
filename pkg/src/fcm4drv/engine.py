"""FCM reasoning over discrete random variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .activation import ActivationSpec, activate_drv
from .aggregate import AggregatorSpec, aggregate
from .drv import DISTANCES, Drv, drv_product, drv_sum, singleton

ZERO = singleton(0.0)


class StructureError(ValueError):
    """Model or state dimensions do not line up."""


@dataclass(eq=True)
class FcmModel:
    """Concepts, a DRV influence matrix and the initial state.

    ``weights[i][j]`` is the influence of concept ``j`` on concept ``i``;
    a missing edge is ``singleton(0)``. ``clamps`` maps concept indices to the
    Drv they are reset to before the first step and after every step.
    """

    concepts: list[str]
    weights: list[list[Drv]]
    initial_state: list[Drv]
    clamps: dict[int, Drv] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.concepts)
        if n == 0:
            raise StructureError("a model needs at least one concept")
        if len(set(self.concepts)) != n:
            raise StructureError("concept names must be unique")
        if len(self.weights) != n or any(len(row) != n for row in self.weights):
            raise StructureError(f"weights must be a {n}x{n} matrix")
        if len(self.initial_state) != n:
            raise StructureError(f"initial state has {len(self.initial_state)} entries, expected {n}")
        for i, row in enumerate(self.weights):
            for j, w in enumerate(row):
                if w.min < -1.0 or w.max > 1.0:
                    raise ValueError(
                        f"weight {self.concepts[j]} -> {self.concepts[i]} leaves [-1, 1]"
                    )
        for i in self.clamps:
            if not 0 <= i < n:
                raise StructureError(f"clamp index {i} out of range")

    @property
    def n(self) -> int:
        return len(self.concepts)

    def index(self, name: str) -> int:
        return self.concepts.index(name)

    def incoming(self, i: int) -> list[int]:
        """Indices ``j`` with a non-zero edge ``j -> i``, ascending."""
        return [j for j, w in enumerate(self.weights[i]) if w != ZERO]

    def is_singleton(self) -> bool:
        drvs = [w for row in self.weights for w in row]
        drvs += list(self.initial_state) + list(self.clamps.values())
        return all(d.is_singleton() for d in drvs)

    def with_initial_state(self, state: Sequence[Drv]) -> "FcmModel":
        return FcmModel(list(self.concepts), self.weights, list(state), dict(self.clamps))

    @classmethod
    def from_matrix(cls, concepts, matrix, initial_state, clamps: Mapping | None = None) -> "FcmModel":
        """Build a model from a real (or mixed real/Drv) matrix and state."""

        def as_drv(v):
            return v if isinstance(v, Drv) else singleton(v)

        weights = [[as_drv(w) for w in row] for row in matrix]
        state = [as_drv(a) for a in initial_state]
        clamp_map = {}
        for key, value in (clamps or {}).items():
            idx = concepts.index(key) if isinstance(key, str) else int(key)
            clamp_map[idx] = as_drv(value)
        return cls(list(concepts), weights, state, clamp_map)


@dataclass
class ReasoningTrace:
    """The state sequence A(0), A(1), ... together with convergence metadata."""

    states: list[list[Drv]]
    converged: bool = False
    convergence_iteration: int | None = None
    per_iteration_distances: list[float] = field(default_factory=list)

    @property
    def final_state(self) -> list[Drv]:
        return self.states[-1]

    @property
    def n_iter(self) -> int:
        return len(self.states) - 1


def _bounded(acc: Drv, aggregator: AggregatorSpec | None) -> Drv:
    if aggregator is None or len(acc) <= aggregator.k:
        return acc
    return aggregate(aggregator, acc)


def update_concept(
    model: FcmModel,
    state: Sequence[Drv],
    i: int,
    activation: ActivationSpec,
    aggregator: AggregatorSpec | None,
) -> Drv:
    """New activation of concept `i`, folding incoming terms left to right.

    Terms are taken in ascending source index and zero edges are skipped.
    Every partial result whose support exceeds ``aggregator.k`` is compacted,
    both after each sum and for a single weighted term before it is added.
    Passing ``aggregator=None`` disables compaction.
    """
    if len(state) != model.n:
        raise StructureError(f"state has {len(state)} entries, model has {model.n} concepts")
    if not 0 <= i < model.n:
        raise StructureError(f"concept index {i} out of range")
    row = model.weights[i]
    acc = None
    for j in model.incoming(i):
        term = _bounded(drv_product(row[j], state[j]), aggregator)
        acc = term if acc is None else _bounded(drv_sum(acc, term), aggregator)
    if acc is None:
        acc = ZERO
    return activate_drv(activation, acc)


def apply_clamps(model: FcmModel, state: Sequence[Drv]) -> list[Drv]:
    out = list(state)
    for i, d in model.clamps.items():
        out[i] = d
    return out


def step(
    model: FcmModel,
    state: Sequence[Drv],
    activation: ActivationSpec,
    aggregator: AggregatorSpec | None,
) -> list[Drv]:
    """One synchronous update: every concept reads the same previous state."""
    new = [update_concept(model, state, i, activation, aggregator) for i in range(model.n)]
    return apply_clamps(model, new)


def state_distance(prev: Sequence[Drv], next: Sequence[Drv], metric: str = "emd") -> float:
    if len(prev) != len(next):
        raise StructureError(f"state lengths differ: {len(prev)} != {len(next)}")
    dist = DISTANCES[metric]
    return max(dist(a, b) for a, b in zip(prev, next))


def has_converged(prev: Sequence[Drv], next: Sequence[Drv], tol: float, metric: str = "emd") -> bool:
    return state_distance(prev, next, metric) < tol


def run(
    model: FcmModel,
    activation: ActivationSpec,
    aggregator: AggregatorSpec | None,
    max_iters: int = 25,
    tol: float = 1e-4,
    metric: str = "emd",
) -> ReasoningTrace:
    """Iterate `step` from the (clamped) initial state until convergence or `max_iters`."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if metric not in DISTANCES:
        raise ValueError(f"unknown metric {metric!r}; expected one of {tuple(DISTANCES)}")
    state = apply_clamps(model, model.initial_state)
    trace = ReasoningTrace(states=[state])
    for it in range(1, max_iters + 1):
        new = step(model, state, activation, aggregator)
        d = state_distance(state, new, metric)
        trace.states.append(new)
        trace.per_iteration_distances.append(d)
        state = new
        if d < tol:
            trace.converged = True
            trace.convergence_iteration = it
            break
    return trace
