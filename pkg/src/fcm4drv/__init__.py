"""Fuzzy cognitive map reasoning with discrete random variables."""

from importlib.resources import files

from .activation import ActivationSpec, activate, activate_drv
from .aggregate import (
    AggregatorSpec,
    aggregate,
    aggregate_dbscan,
    aggregate_kmeans,
    aggregate_percentile_rank,
    aggregate_unibins,
)
from .drv import (
    Drv,
    NumericDomainError,
    drv_map,
    drv_product,
    drv_sum,
    emd_distance,
    expected_value,
    ks_distance,
    quantile,
    singleton,
    uniform_grid,
)
from .engine import FcmModel, ReasoningTrace, StructureError, has_converged, run, step, update_concept
from .estimator import FCMReasoner
from .io import load_model, parse_model, render_model, write_percentile_csv, write_trace_csv

__version__ = "0.1.0"


def academic_units_path():
    """Path of the bundled academic-units model file."""
    return files(__name__) / "data" / "academic_units.fcm"


def load_academic_units() -> FcmModel:
    return parse_model(academic_units_path().read_text(encoding="utf-8"))
