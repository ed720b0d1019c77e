"""Estimator-style front end for DRV reasoning."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .activation import ActivationSpec
from .aggregate import AggregatorSpec
from .drv import DISTANCES, expected_value, quantile
from .engine import FcmModel, run


def check_model(model) -> FcmModel:
    if not isinstance(model, FcmModel):
        raise TypeError(f"expected an FcmModel, got {type(model).__name__}")
    return model


class FCMReasoner(BaseEstimator):
    """Run DRV-valued FCM reasoning on a model.

    Parameters
    ----------
    activation : str
        Squashing function, one of ``bivalent``, ``trivalent``,
        ``linear_cutoff``, ``logistic``, ``tanh``, ``s_exp``.
    m, lam : float
        Slopes of ``s_exp`` and ``logistic``.
    aggregator : str
        ``simple_kmeans``, ``dbscan``, ``unibins`` or ``percentile_rank``.
    k : int
        Support bound enforced on partial sums.
    minpts, kmeans_max_iters : int
        DBSCAN minimal cluster size and the k-means iteration cap.
    max_iters, tol, metric
        Stop after `max_iters` steps or once every concept moves less than
        `tol` under `metric` (``emd`` or ``ks``).

    Attributes
    ----------
    trace_ : ReasoningTrace
    converged_ : bool
    n_iter_ : int
    concepts_ : list of str
    """

    def __init__(
        self,
        activation="s_exp",
        m=1.0,
        lam=1.0,
        aggregator="percentile_rank",
        k=100,
        minpts=6,
        kmeans_max_iters=100,
        max_iters=25,
        tol=1e-4,
        metric="emd",
    ):
        self.activation = activation
        self.m = m
        self.lam = lam
        self.aggregator = aggregator
        self.k = k
        self.minpts = minpts
        self.kmeans_max_iters = kmeans_max_iters
        self.max_iters = max_iters
        self.tol = tol
        self.metric = metric

    def _specs(self) -> tuple[ActivationSpec, AggregatorSpec]:
        if self.metric not in DISTANCES:
            raise ValueError(f"metric must be one of {tuple(DISTANCES)}, got {self.metric!r}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        act = ActivationSpec(self.activation, m=self.m, lam=self.lam)
        agg = AggregatorSpec(self.aggregator, k=self.k, minpts=self.minpts, kmeans_max_iters=self.kmeans_max_iters)
        return act, agg

    def fit(self, model, y=None):
        model = check_model(model)
        activation, aggregator = self._specs()
        self.trace_ = run(model, activation, aggregator, int(self.max_iters), self.tol, self.metric)
        self.converged_ = self.trace_.converged
        self.n_iter_ = self.trace_.n_iter
        self.concepts_ = list(model.concepts)
        return self

    def transform(self, model):
        """Run on `model` and return its final state as a list of Drv."""
        return self.fit(model).trace_.final_state

    def fit_transform(self, model, y=None):
        return self.transform(model)

    def expected_values(self) -> np.ndarray:
        """Per-iteration means, shape ``(n_iter_ + 1, n_concepts)``."""
        check_is_fitted(self, "trace_")
        return np.array([[expected_value(d) for d in s] for s in self.trace_.states])

    def percentiles(self, ranks) -> np.ndarray:
        """Per-iteration quantiles, shape ``(n_iter_ + 1, n_concepts, len(ranks))``."""
        check_is_fitted(self, "trace_")
        return np.array([[[quantile(d, r) for r in ranks] for d in s] for s in self.trace_.states])
