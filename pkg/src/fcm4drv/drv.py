"""Discrete random variables with finite support and exact convolution arithmetic."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping

import numpy as np

#: values closer than this (absolute) are coalesced into one atom
MERGE_EPS = 1e-9
#: atoms whose normalized mass falls below this are pruned
PRUNE_EPS = 1e-15
#: tolerance on the total mass of user-supplied distributions
MASS_TOL = 1e-6
_NORM_SLACK = 1e-12


class NumericDomainError(ValueError):
    """A scalar function produced a non-finite value on a DRV atom."""


def _compact(values: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # lexsort on (value, prob) makes the accumulation order a function of the
    # multiset of atoms only, so x+y and y+x produce bit-identical results
    order = np.lexsort((probs, values))
    values = values[order]
    probs = probs[order]
    if values.size > 1:
        breaks = np.flatnonzero(np.diff(values) >= MERGE_EPS) + 1
        if breaks.size + 1 < values.size:
            starts = np.concatenate(([0], breaks))
            mass = np.add.reduceat(probs, starts)
            moment = np.add.reduceat(values * probs, starts)
            ends = np.append(breaks, values.size) - 1
            with np.errstate(invalid="ignore", divide="ignore"):
                merged = moment / mass
            # groups of exactly equal values keep that value; others use the weighted mean
            exact = (values[starts] == values[ends]) | (mass <= 0)
            merged[exact] = values[starts[exact]]
            values, probs = merged, mass
    total = probs.sum()
    # skipping sub-1e-12 corrections keeps renormalization idempotent
    if abs(total - 1.0) > _NORM_SLACK:
        probs = probs / total
    keep = probs >= PRUNE_EPS
    if not keep.all():
        values, probs = values[keep], probs[keep]
        probs = probs / probs.sum()
    if probs.size == 1:
        probs = np.ones(1)
    return values, probs


class Drv:
    """Finite probability mass function over real values.

    Atoms are kept sorted by value, with values closer than ``MERGE_EPS``
    coalesced and masses renormalized to one. Instances are immutable.

    Parameters
    ----------
    values : array-like of float
        Support points, in any order. Duplicates are merged.
    probs : array-like of float
        Non-negative masses, one per value, summing to one within ``MASS_TOL``.
    """

    __slots__ = ("_values", "_probs", "_cdf")

    def __init__(self, values: Iterable[float], probs: Iterable[float]):
        v = np.asarray(values, dtype=float).ravel()
        p = np.asarray(probs, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("a Drv needs at least one value")
        if v.shape != p.shape:
            raise ValueError(f"values and probs differ in length: {v.size} != {p.size}")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(p)):
            raise ValueError("values and probs must be finite")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        total = p.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        self._set(*_compact(v, p))

    def _set(self, values: np.ndarray, probs: np.ndarray) -> None:
        values.flags.writeable = False
        probs.flags.writeable = False
        self._values = values
        self._probs = probs
        self._cdf = None

    @classmethod
    def _from_raw(cls, values: np.ndarray, probs: np.ndarray) -> "Drv":
        """Build from unnormalized atoms without the user-input checks."""
        out = cls.__new__(cls)
        out._set(*_compact(np.asarray(values, dtype=float), np.asarray(probs, dtype=float)))
        return out

    @classmethod
    def from_dict(cls, pmf: Mapping[float, float]) -> "Drv":
        return cls(list(pmf.keys()), list(pmf.values()))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def cdf(self) -> np.ndarray:
        """Right-continuous CDF evaluated at each support point."""
        if self._cdf is None:
            cdf = np.cumsum(self._probs)
            cdf[-1] = 1.0
            cdf.flags.writeable = False
            self._cdf = cdf
        return self._cdf

    @property
    def min(self) -> float:
        return float(self._values[0])

    @property
    def max(self) -> float:
        return float(self._values[-1])

    def is_singleton(self) -> bool:
        return self._values.size == 1

    def to_dict(self) -> dict[float, float]:
        return dict(zip(self._values.tolist(), self._probs.tolist()))

    def __len__(self) -> int:
        return int(self._values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Drv):
            return NotImplemented
        return np.array_equal(self._values, other._values) and np.array_equal(self._probs, other._probs)

    def __hash__(self) -> int:
        return hash((self._values.tobytes(), self._probs.tobytes()))

    def __repr__(self) -> str:
        if len(self) <= 6:
            body = ", ".join(f"{v:g}: {p:g}" for v, p in zip(self._values, self._probs))
            return f"Drv({{{body}}})"
        return f"Drv(<{len(self)} atoms on [{self.min:g}, {self.max:g}]>)"

    def __add__(self, other: "Drv") -> "Drv":
        return drv_sum(self, other)

    def __mul__(self, other: "Drv") -> "Drv":
        return drv_product(self, other)


def singleton(c: float) -> Drv:
    """Return the degenerate variable taking value `c` with probability one."""
    c = float(c)
    if not math.isfinite(c):
        raise ValueError(f"singleton value must be finite, got {c!r}")
    return Drv._from_raw(np.array([c]), np.array([1.0]))


def uniform_grid(min: float, max: float, count: int) -> Drv:
    """`count` equally spaced values over ``[min, max]``, each with mass ``1/count``."""
    if not (math.isfinite(min) and math.isfinite(max)) or min >= max:
        raise ValueError(f"need finite min < max, got [{min}, {max}]")
    if int(count) != count or count < 2:
        raise ValueError(f"count must be an integer >= 2, got {count!r}")
    count = int(count)
    return Drv._from_raw(np.linspace(min, max, count), np.full(count, 1.0 / count))


def drv_sum(x: Drv, y: Drv) -> Drv:
    """Distribution of ``X + Y`` for independent `x` and `y`."""
    values = np.add.outer(x.values, y.values).ravel()
    probs = np.multiply.outer(x.probs, y.probs).ravel()
    return Drv._from_raw(values, probs)


def drv_product(x: Drv, y: Drv) -> Drv:
    """Distribution of ``X * Y`` for independent `x` and `y`."""
    values = np.multiply.outer(x.values, y.values).ravel()
    probs = np.multiply.outer(x.probs, y.probs).ravel()
    return Drv._from_raw(values, probs)


def drv_map(x: Drv, f: Callable[[float], float]) -> Drv:
    """Push `x` through the scalar function `f`; colliding images accumulate mass.

    `f` may be vectorized (accepting an ndarray); plain scalar callables are
    applied atom by atom.
    """
    try:
        out = np.asarray(f(x.values), dtype=float)
        if out.shape != x.values.shape:
            raise TypeError
    except (TypeError, ValueError):
        out = np.array([f(float(v)) for v in x.values], dtype=float)
    bad = ~np.isfinite(out)
    if bad.any():
        v = float(x.values[np.argmax(bad)])
        raise NumericDomainError(f"function is not finite at input value {v!r}")
    return Drv._from_raw(out, x.probs.copy())


def expected_value(x: Drv) -> float:
    return float(np.dot(x.values, x.probs))


def variance(x: Drv) -> float:
    mu = expected_value(x)
    return float(np.dot((x.values - mu) ** 2, x.probs))


# absorbs cumsum rounding so that e.g. rank 0.5 hits the 50th of 100 equal atoms
_RANK_SLACK = 1e-12


def quantile(x: Drv, rank: float) -> float:
    """Smallest support value whose cumulative probability reaches `rank`."""
    if not 0.0 <= rank <= 1.0:
        raise ValueError(f"rank must lie in [0, 1], got {rank!r}")
    idx = int(np.searchsorted(x.cdf, rank - _RANK_SLACK, side="left"))
    return float(x.values[min(idx, len(x) - 1)])


def _cdf_on(x: Drv, grid: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(x.values, grid, side="right")
    return np.concatenate(([0.0], x.cdf))[idx]


def _cdf_gaps(x: Drv, y: Drv) -> tuple[np.ndarray, np.ndarray]:
    grid = np.union1d(x.values, y.values)
    return grid, np.abs(_cdf_on(x, grid) - _cdf_on(y, grid))


def emd_distance(x: Drv, y: Drv) -> float:
    """Earth mover's distance: area between the two CDFs."""
    grid, gaps = _cdf_gaps(x, y)
    return float(np.dot(gaps[:-1], np.diff(grid)))


def ks_distance(x: Drv, y: Drv) -> float:
    """Kolmogorov-Smirnov distance: largest vertical gap between the CDFs."""
    _, gaps = _cdf_gaps(x, y)
    return float(gaps.max())


DISTANCES: dict[str, Callable[[Drv, Drv], float]] = {
    "emd": emd_distance,
    "ks": ks_distance,
}
