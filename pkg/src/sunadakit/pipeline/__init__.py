from .bundle import BundleError, FixtureBundle, fixture_names
from .methods import (
    run_batch,
    run_bianchi_session,
    run_low_index,
    run_method_g,
    run_method_r,
    run_sunada_pairs,
)
from .report import SCHEMA_VERSION, Check, RunReport, Stage

__all__ = [
    "BundleError",
    "Check",
    "FixtureBundle",
    "RunReport",
    "SCHEMA_VERSION",
    "Stage",
    "fixture_names",
    "run_batch",
    "run_bianchi_session",
    "run_low_index",
    "run_method_g",
    "run_method_r",
    "run_sunada_pairs",
]
