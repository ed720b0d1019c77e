import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcm4drv.aggregate import (
    KINDS,
    AggregatorSpec,
    aggregate,
    aggregate_dbscan,
    aggregate_kmeans,
    aggregate_percentile_rank,
    aggregate_unibins,
    kmeans_1d,
    percentile_rank_points,
)
from fcm4drv.drv import Drv, expected_value, singleton, uniform_grid

from conftest import drvs


@pytest.mark.parametrize("kind", KINDS)
def test_singleton_passes_through(kind):
    assert aggregate(AggregatorSpec(kind, k=5), singleton(0.3)) == singleton(0.3)


def test_spec_validation():
    with pytest.raises(ValueError):
        AggregatorSpec("median", k=10)
    with pytest.raises(ValueError):
        AggregatorSpec("unibins", k=1)
    with pytest.raises(ValueError):
        AggregatorSpec("dbscan", minpts=0)


# --- simple k-means --------------------------------------------------------


def test_kmeans_hand_example():
    # centroids start at 0.1 and 0.9; one Lloyd update moves the first to 0.105
    out = aggregate_kmeans(Drv([0.1, 0.11, 0.9], [0.5, 0.3, 0.2]), k=2)
    assert out.values == pytest.approx([0.105, 0.9], abs=1e-15)
    assert out.probs == pytest.approx([0.8, 0.2], abs=1e-15)


def test_kmeans_small_input_unchanged():
    x = Drv([0.0, 0.1, 1.0], [0.2, 0.3, 0.5])
    assert aggregate_kmeans(x, k=3) == x


def test_kmeans_centroid_is_unweighted():
    out = aggregate_kmeans(Drv([0.0, 0.02, 1.0], [0.9, 0.05, 0.05]), k=2)
    assert out.values[0] == pytest.approx(0.01)
    assert expected_value(out) != pytest.approx(0.05 * 0.02 + 0.05)


def test_kmeans_ties_go_left():
    labels, _ = kmeans_1d(np.array([0.0, 0.5, 1.0]), k=2, max_iters=1)
    assert labels.tolist() == [0, 0, 1]


def test_kmeans_drops_empty_clusters():
    x = Drv([0.0, 0.01, 0.02, 0.98, 0.99, 1.0], np.full(6, 1 / 6))
    out = aggregate_kmeans(x, k=5)
    assert len(out) == 2


@settings(max_examples=200, deadline=None)
@given(drvs(min_size=2, max_size=60), st.integers(2, 12))
def test_kmeans_mean_within_cluster_width(x, k):
    out = aggregate_kmeans(x, k)
    if len(x) <= k:
        assert out == x
        return
    labels, _ = kmeans_1d(x.values, k)
    widths = [np.ptp(x.values[labels == c]) for c in np.unique(labels)]
    assert abs(expected_value(out) - expected_value(x)) <= max(widths) + 1e-12


# --- DBSCAN ----------------------------------------------------------------


def test_dbscan_two_groups():
    left = np.linspace(0.0, 0.05, 6)
    right = np.linspace(0.95, 1.0, 6)
    probs = np.r_[np.full(6, 0.05), np.linspace(0.06, 0.11, 6)]
    probs /= probs.sum()
    x = Drv(np.r_[left, right], probs)
    out = aggregate_dbscan(x, k=10, minpts=6)
    assert len(out) == 2
    pl, pr = probs[:6], probs[6:]
    assert out.probs == pytest.approx([pl.sum(), pr.sum()], abs=1e-12)
    assert out.values == pytest.approx(
        [np.dot(left, pl) / pl.sum(), np.dot(right, pr) / pr.sum()], abs=1e-12
    )


def test_dbscan_keeps_noise_point():
    dense = np.linspace(0.0, 0.09, 10)
    x = Drv(np.r_[dense, 1.0], np.r_[np.full(10, 0.09), 0.1])
    out = aggregate_dbscan(x, k=20, minpts=6)
    assert out.to_dict()[1.0] == pytest.approx(0.1, abs=1e-12)
    assert len(out) == 2
    assert out.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_dbscan_too_few_points_is_identity():
    x = Drv([0.0, 0.01, 0.02], [0.3, 0.3, 0.4])
    assert aggregate_dbscan(x, k=2, minpts=6) == x


def test_dbscan_sparse_input_is_identity():
    x = Drv([0.0, 0.5, 1.0], [0.2, 0.3, 0.5])
    assert aggregate_dbscan(x, k=3, minpts=6) == x


def test_dbscan_compacts_smooth_input():
    x = uniform_grid(-1, 1, 600)
    out = aggregate_dbscan(x, k=100, minpts=6)
    assert len(out) < 100


# --- UniBins ---------------------------------------------------------------


def test_unibins_linear_split():
    x = Drv([0.0, 0.25, 1.0], [0.2, 0.6, 0.2])
    out = aggregate_unibins(x, k=3)
    assert out.to_dict() == pytest.approx({0.0: 0.5, 0.5: 0.3, 1.0: 0.2})


def test_unibins_value_on_centre_keeps_mass():
    x = Drv([0.0, 0.5, 1.0], [0.1, 0.6, 0.3])
    assert aggregate_unibins(x, k=3) == x


def test_unibins_on_grid_is_identity():
    x = uniform_grid(-1, 1, 11)
    assert aggregate_unibins(x, k=11) == x


# --- PercentileRank --------------------------------------------------------


def test_percentile_rank_two_atoms():
    x = Drv([0, 1], [0.5, 0.5])
    assert aggregate_percentile_rank(x, k=2) == x


def test_percentile_rank_uniform_grid():
    # interpolated CDF passes through ((i + 1/2) / n) at grid point i / (n - 1)
    n = 1000
    for k in (4, 10):
        out = aggregate_percentile_rank(uniform_grid(0, 1, n), k)
        ranks = (np.arange(k) + 0.5) / k
        assert out.values == pytest.approx((n * ranks - 0.5) / (n - 1), abs=1e-12)
        assert out.probs == pytest.approx(np.full(k, 1 / k), abs=1e-12)
    assert aggregate_percentile_rank(uniform_grid(0, 1, n), 10).values == pytest.approx(
        np.arange(10) / 10 + 0.05, abs=1e-3
    )


def test_percentile_rank_heavy_atom_spreads():
    x = Drv([0.0, 1.0], [0.9, 0.1])
    pts = percentile_rank_points(x, 10)
    # several outputs land strictly inside the segment next to the heavy atom
    assert np.sum((pts > 0) & (pts < 1)) >= 3
    assert np.all(np.diff(pts) >= 0)


def test_percentile_rank_coalesces_repeats():
    out = aggregate_percentile_rank(Drv([0.0, 1.0], [0.98, 0.02]), k=10)
    assert len(out) < 10
    assert out.probs.sum() == pytest.approx(1.0)


# --- shared properties -----------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(drvs(min_size=1, max_size=80), st.integers(2, 20), st.sampled_from(KINDS))
def test_aggregator_invariants(x, k, kind):
    spec = AggregatorSpec(kind, k=k, minpts=3)
    out = aggregate(spec, x)
    assert abs(out.probs.sum() - 1) < 1e-9
    assert out.min >= x.min and out.max <= x.max
    if kind == "dbscan":
        assert len(out) <= len(x)
    else:
        assert len(out) <= k
    assert aggregate(spec, x) == out


@settings(max_examples=150, deadline=None)
@given(drvs(min_size=2, max_size=80), st.integers(2, 20))
def test_unibins_preserves_mean(x, k):
    assert expected_value(aggregate_unibins(x, k)) == pytest.approx(expected_value(x), abs=1e-9)
