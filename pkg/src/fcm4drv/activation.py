"""Activation (squashing) functions and their lift to discrete random variables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drv import Drv, NumericDomainError, drv_map

KINDS = ("bivalent", "trivalent", "linear_cutoff", "logistic", "tanh", "s_exp")

_UNIT = (0.0, 1.0)
_SYMMETRIC = (-1.0, 1.0)


@dataclass(frozen=True)
class ActivationSpec:
    """Which squashing function to apply, with its slope parameters.

    ``m`` is the slope of ``s_exp``; ``lam`` the steepness of ``logistic``.
    """

    kind: str = "s_exp"
    m: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown activation {self.kind!r}; expected one of {KINDS}")
        if not self.m > 0 or not self.lam > 0:
            raise ValueError("activation slopes m and lam must be positive")

    @property
    def output_range(self) -> tuple[float, float]:
        return _UNIT if self.kind in ("bivalent", "logistic") else _SYMMETRIC

    def __call__(self, x):
        return activate(self, x)


def _s_exp(x: np.ndarray, m: float) -> np.ndarray:
    # odd extension: exp(m*x) - 1 below zero keeps the curve bounded in [-1, 1]
    return np.where(x >= 0, -np.expm1(-m * np.abs(x)), np.expm1(-m * np.abs(x)))


def _logistic(x: np.ndarray, lam: float) -> np.ndarray:
    z = np.exp(-lam * np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def activate(spec: ActivationSpec, x):
    """Evaluate the activation on a scalar or an ndarray."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericDomainError(f"activation input must be finite, got {x!r}")
    kind = spec.kind
    if kind == "s_exp":
        out = _s_exp(arr, spec.m)
    elif kind == "tanh":
        out = np.tanh(arr)
    elif kind == "logistic":
        out = _logistic(arr, spec.lam)
    elif kind == "linear_cutoff":
        out = np.clip(arr, -1.0, 1.0)
    elif kind == "trivalent":
        out = np.sign(arr)
    else:
        out = (arr > 0).astype(float)
    if out.ndim == 0:
        return float(out)
    return out


def activate_drv(spec: ActivationSpec, x: Drv) -> Drv:
    return drv_map(x, spec)

