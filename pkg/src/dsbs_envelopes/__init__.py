"""Minimum-divergence region of a symmetric binary pair, with envelopes.

The package is organised bottom-up:

- :mod:`.binary` — scalar binary entropy/divergence machinery and the
  source parameters.
- :mod:`.mre` — the two-letter divergence surface ``dd2`` and its exact
  minimizer ``p_star``.
- :mod:`.envelopes` — the surface slices ``phi``/``psi``, their monotone
  rearrangements, and the slope-indexed families ``phi_q``/``psi_q``.
- :mod:`.hulls` — grid convex-hull and curvature certificates.
- :mod:`.stationary` — stationarity root equation, coupling
  reconstruction, and saddle-value extrema.
- :mod:`.verify` — the claim registry tying everything together.
- :mod:`.cli` — ``dsbs-envelopes`` command-line entry point.
"""

__version__ = "0.1.0"

from .binary import (
    BinaryDist,
    Coupling2x2,
    DsbsParams,
    bconv,
    bdeconv,
    d2,
    d2_inv,
    h2,
    h2_inv,
    kl_binary,
    kl_joint,
)
from .envelopes import (
    QParam,
    in_s0,
    in_s0_transpose,
    phi,
    phi_grid,
    phi_q,
    phi_q_full,
    phi_q_tilde,
    phi_tilde,
    phi_tilde_ab,
    phi_tilde_grid,
    phi_tilde_oracle,
    psi,
    psi_grid,
    psi_q,
    psi_q_full,
    psi_q_tilde,
    psi_tilde_oracle,
)
from .errors import (
    DsbsError,
    FeasibilityError,
    InconsistencyError,
    InputDomainError,
    NoRootError,
)
from .hulls import (
    ConvexityReport,
    GridFn,
    check_midpoint_concave,
    check_midpoint_convex,
    check_monotone,
    check_slope_bounds,
    legendre_envelope_1d,
    legendre_envelope_2d,
    lower_convex_envelope,
    upper_concave_envelope,
)
from .mre import MreResult, RegionPoint, d2ab, dd2, dd2_oracle, p_star, region_sample
from .stationary import (
    GammaExtremum,
    RootProblem,
    StationaryPoint,
    aux_phi_h,
    count_roots_scan,
    eta_of_h,
    gamma_extremum,
    h0_threshold,
    hypercontractive_regime,
    reconstruct_coupling,
    solve_root_z,
    stationary_point,
)
from .verify import (
    CLAIM_IDS,
    ClaimResult,
    VerificationReport,
    VerifyOptions,
    default_tolerances,
    verify_all,
)

__all__ = [
    "BinaryDist",
    "CLAIM_IDS",
    "ClaimResult",
    "ConvexityReport",
    "Coupling2x2",
    "DsbsError",
    "DsbsParams",
    "FeasibilityError",
    "GammaExtremum",
    "GridFn",
    "InconsistencyError",
    "InputDomainError",
    "MreResult",
    "NoRootError",
    "QParam",
    "RegionPoint",
    "RootProblem",
    "StationaryPoint",
    "VerificationReport",
    "VerifyOptions",
    "aux_phi_h",
    "bconv",
    "bdeconv",
    "check_midpoint_concave",
    "check_midpoint_convex",
    "check_monotone",
    "check_slope_bounds",
    "count_roots_scan",
    "d2",
    "d2_inv",
    "d2ab",
    "dd2",
    "dd2_oracle",
    "default_tolerances",
    "eta_of_h",
    "gamma_extremum",
    "h0_threshold",
    "h2",
    "h2_inv",
    "hypercontractive_regime",
    "in_s0",
    "in_s0_transpose",
    "kl_binary",
    "kl_joint",
    "legendre_envelope_1d",
    "legendre_envelope_2d",
    "lower_convex_envelope",
    "p_star",
    "phi",
    "phi_grid",
    "phi_q",
    "phi_q_full",
    "phi_q_tilde",
    "phi_tilde",
    "phi_tilde_ab",
    "phi_tilde_grid",
    "phi_tilde_oracle",
    "psi",
    "psi_grid",
    "psi_q",
    "psi_q_full",
    "psi_q_tilde",
    "psi_tilde_oracle",
    "reconstruct_coupling",
    "region_sample",
    "solve_root_z",
    "stationary_point",
    "upper_concave_envelope",
    "verify_all",
]
