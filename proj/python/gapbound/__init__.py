"""Spectral gap and ground-state localization bounds for one-particle lattice models."""

from ._core import (
    DecayFit,
    EnvelopeCheck,
    FuzzReport,
    InvariantError,
    ModelSpec,
    PositionStats,
    Spectrum,
    SweepRow,
    Theorem1Bound,
    Theorem2Bound,
    assemble,
    c1_constant,
    chebyshev_max_vx,
    check_nearest_neighbor,
    density,
    fit_envelope,
    fit_localization_length,
    impurity_model,
    log_spaced_h0,
    lowest_two,
    parse_model,
    position_stats,
    run_fuzz,
    run_sweep,
    tail,
    theorem1_bound,
    theorem2_bound,
    verify_envelope,
)

__all__ = [name for name in dir() if not name.startswith("_")]
