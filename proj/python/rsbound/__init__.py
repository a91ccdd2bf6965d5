"""Click-probability bounds for finite-size detectors of coherent states."""

from ._core import (
    BoundResult,
    ConfigError,
    ModelParams,
    OracleReport,
    OverlapSettings,
    OverlapTable,
    ZetaSearchSpec,
    approx_error,
    bessel_j1,
    boosted_overlap,
    bound_min,
    build_overlap_table,
    bump_phi,
    bump_theta,
    cached_overlap_table,
    gaussian,
    generic_bound,
    ideal_click_probability,
    norm_factor,
    onshell_ft,
    p_ideal,
    profile_h,
    smearing_f,
    sweep,
    verify,
    w2_self,
)

__version__ = "0.1.0"
