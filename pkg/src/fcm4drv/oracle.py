"""Reference implementations for testing the DRV engine.

None of these share code paths with the convolution engine beyond the Drv
container and the activation formulas:

* ``exact_step`` enumerates every joint outcome of a row, with no aggregation.
* ``classical_run`` is the plain scalar FCM iteration.
* ``monte_carlo_run`` samples scalar initial states and runs them classically.

Random draws use NumPy's PCG64 bit generator seeded with ``OracleConfig.seed``.
Concept ``j`` (in index order) receives ``samples`` consecutive uniform
doubles from ``Generator.random`` and maps them through the inverse CDF of
its initial Drv (first atom whose cumulative mass exceeds the draw).
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .activation import ActivationSpec, activate
from .drv import Drv
from .engine import FcmModel

MAX_ENUMERATION = 10**6


class CapacityError(RuntimeError):
    """Joint enumeration would exceed ``MAX_ENUMERATION`` outcomes."""


@dataclass(frozen=True)
class OracleConfig:
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


def exact_step(model: FcmModel, state: Sequence[Drv], activation: ActivationSpec) -> list[Drv]:
    """One synchronous step by brute-force enumeration of joint outcomes."""
    out = []
    for i in range(model.n):
        sources = model.incoming(i)
        factors = []
        size = 1
        for j in sources:
            w, a = model.weights[i][j], state[j]
            size *= len(w) * len(a)
            factors += [w, a]
        if size > MAX_ENUMERATION:
            raise CapacityError(f"concept {model.concepts[i]!r} needs {size} joint outcomes")
        pmf: dict[float, float] = defaultdict(float)
        atoms = [list(zip(f.values.tolist(), f.probs.tolist())) for f in factors]
        for combo in itertools.product(*atoms):
            total = 0.0
            prob = 1.0
            for (w, pw), (a, pa) in zip(combo[::2], combo[1::2]):
                total = total + w * a
                prob *= pw * pa
            pmf[total] += prob
        values = activate(activation, np.array(list(pmf.keys())))
        out.append(Drv._from_raw(np.atleast_1d(values), np.array(list(pmf.values()))))
    for i, d in model.clamps.items():
        out[i] = d
    return out


def _scalar_matrix(model: FcmModel) -> np.ndarray:
    return np.array([[w.min for w in row] for row in model.weights])


def _iterate(model, weights, states, clamp_idx, clamp_val, activation, iters):
    # states: (samples, n). Sums run in ascending source order, skipping zero edges.
    history = [states.copy()]
    sources = [np.flatnonzero(weights[i]) for i in range(model.n)]
    for _ in range(iters):
        new = np.empty_like(states)
        for i in range(model.n):
            acc = np.zeros(states.shape[0])
            for j in sources[i]:
                acc = acc + weights[i, j] * states[:, j]
            new[:, i] = activate(activation, acc)
        new[:, clamp_idx] = clamp_val
        states = new
        history.append(states.copy())
    return history


def _clamp_arrays(model: FcmModel) -> tuple[np.ndarray, np.ndarray]:
    if any(not d.is_singleton() for d in model.clamps.values()):
        raise ValueError("scalar reference runs need singleton clamps")
    idx = np.array(sorted(model.clamps), dtype=int)
    val = np.array([model.clamps[i].min for i in sorted(model.clamps)])
    return idx, val


def classical_run(model: FcmModel, activation: ActivationSpec, max_iters: int) -> list[np.ndarray]:
    """Scalar FCM iteration; returns A(0), ..., A(max_iters) as float vectors."""
    if not model.is_singleton():
        raise ValueError("classical_run needs a model whose every Drv is a singleton")
    idx, val = _clamp_arrays(model)
    a0 = np.array([[d.min for d in model.initial_state]])
    a0[:, idx] = val
    history = _iterate(model, _scalar_matrix(model), a0, idx, val, activation, max_iters)
    return [h[0] for h in history]


def sample_initial(model: FcmModel, config: OracleConfig) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    cols = []
    for d in model.initial_state:
        u = rng.random(config.samples)
        idx = np.searchsorted(d.cdf, u, side="right")
        cols.append(d.values[np.minimum(idx, len(d) - 1)])
    return np.column_stack(cols)


def monte_carlo_run(
    model: FcmModel, activation: ActivationSpec, iters: int, config: OracleConfig
) -> np.ndarray:
    """Empirical per-concept values after `iters` scalar iterations, shape (samples, n)."""
    if any(not w.is_singleton() for row in model.weights for w in row):
        raise ValueError("monte_carlo_run needs singleton weights")
    idx, val = _clamp_arrays(model)
    states = sample_initial(model, config)
    states[:, idx] = val
    return _iterate(model, _scalar_matrix(model), states, idx, val, activation, iters)[-1]


def empirical_drv(samples: np.ndarray) -> Drv:
    values, counts = np.unique(np.asarray(samples, dtype=float), return_counts=True)
    return Drv._from_raw(values, counts / counts.sum())
