"""Link-level simulator for LTE point-to-multipoint transmission.

Covers the two delivery modes (MBSFN over PMCH and SC-PTM over PDSCH)
from analytic spectral-efficiency tables down to Monte-Carlo BLER over
AWGN and i.i.d. Rayleigh channels with MMSE/MRC detection.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataFileError, LinkSimError
from .harness import (
    BlerPoint,
    SimConfig,
    SweepResult,
    ThresholdPoint,
    find_threshold,
    run_bler_point,
    shannon_capacity,
    sweep_se_curve,
    write_sweep_csv,
)
from .numerology import (
    McsEntry,
    Numerology,
    bicm_se,
    canonical_numerology,
    effective_code_rate,
    load_mcs_table,
    mcs_entry,
    n_avail,
    se_table,
)

__all__ = [
    "ConfigError", "DataFileError", "LinkSimError",
    "McsEntry", "Numerology", "bicm_se", "canonical_numerology",
    "effective_code_rate", "load_mcs_table", "mcs_entry", "n_avail", "se_table",
    "BlerPoint", "SimConfig", "SweepResult", "ThresholdPoint",
    "find_threshold", "run_bler_point", "shannon_capacity",
    "sweep_se_curve", "write_sweep_csv",
]
