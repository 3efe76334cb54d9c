"""Lagrangian stationarity machinery: scalar root problems and couplings.

An interior stationary coupling of the exponent pair (p, q) has cells
proportional to ``(y*z, z*theta, y*theta, 1)`` where ``z`` and ``y`` are the
marginal-ratio variables of the two stationarity conditions,

    ((q00+q01)/(q10+q11))^(1/p) = z,      ((q00+q10)/(q01+q11))^(1/q) = y,

and theta is the source odds parameter.  Substituting the cells back into
the conditions couples z and y through the Möbius map
``w(x) = (x+theta)/(1+theta*x)``: writing ``W(h) = ln w(e^h)``, stationarity
reads ``ln y = v*W(ln z)`` and ``ln z = u*W(ln y)`` simultaneously, which
collapses to the scalar root equation

    W(v*W(h)) = r*v*h,            h = ln z,  r = (p-1)(q-1),

(`aux_phi_h` is its left-minus-right side).  For ``|v| > 1``,
``theta in (0,1)`` and ``0 < r < rho^2`` this has exactly one root with
h > 0; the bend point h0 below which no root can sit comes from the
eta-substitution ``eta = 1/w(e^h)`` (`h0_threshold`).

Case conventions (the error-prone bookkeeping, centralized here):

    case      exponents          solved problem      branch      ratio signs
    -------   ----------------   -----------------   ---------   -----------
    forward   p, q > 1           v-side or u-side,   h_a = +h*   X >= 1, Y >= 1
                                 whichever exponent
                                 is larger in size
    reverse   0 < p, q < 1       v-side (v < -1)     h_a = +h*   X >= 1, Y <= 1
    mixed     0 < p < 1, q < 0   u-side (u < -1)     h_b = -h*   X >= 1, Y >= 1

In every case the reported coupling uses the same cell formula; solving the
u-side problem just means the root is ``ln y`` and ``ln z = u*W(ln y)`` is
derived, instead of the other way around.  All cell arithmetic is done in
log space and normalized through logsumexp, so astronomically large z
(small r*v makes h ~ 100) never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ._optim import bisect_root, golden_min, golden_min_vec
from .binary import Coupling2x2, DsbsParams, d2
from .envelopes import QParam, phi_tilde_ab
from .errors import InconsistencyError, InputDomainError, NoRootError
from .mre import dd2_value

__all__ = [
    "RootProblem",
    "StationaryPoint",
    "GammaExtremum",
    "eta_of_h",
    "aux_phi_h",
    "h0_threshold",
    "solve_root_z",
    "count_roots_scan",
    "reconstruct_coupling",
    "stationary_point",
    "gamma_extremum",
    "hypercontractive_regime",
]

_SIGN_SLACK = 1e-9  # tolerance on the case sign patterns, in log-ratio units


@dataclass(frozen=True, slots=True)
class RootProblem:
    """Parameters (theta, v, r) of the scalar root equation.

    Valid when theta is in (0,1), |v| > 1, and 0 < r <= rho^2 with
    rho = (1-theta)/(1+theta).  At r = rho^2 exactly the root merges into
    h = 0 and the solver reports no interior root.
    """

    theta: float
    v: float
    r: float
    rho: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("theta", "v", "r"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or not math.isfinite(val):
                raise InputDomainError(f"{name} must be a finite real number")
        if not 0.0 < self.theta < 1.0:
            raise InputDomainError(f"theta={self.theta!r} outside (0, 1)")
        if abs(self.v) <= 1.0:
            raise InputDomainError(f"|v| must exceed 1, got v={self.v!r}")
        rho = (1.0 - self.theta) / (1.0 + self.theta)
        if not 0.0 < self.r <= rho * rho * (1.0 + 1e-12):
            raise InputDomainError(
                f"r={self.r!r} outside (0, rho^2] with rho^2={rho * rho!r}"
            )
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True, slots=True)
class StationaryPoint:
    """An interior stationary coupling with its surface coordinates."""

    z: float
    coupling: Coupling2x2
    s: float
    t: float
    residual_x: float
    residual_y: float


@dataclass(frozen=True, slots=True)
class GammaExtremum:
    """Extremum of one Lagrangian sweep: value and its optimizer."""

    value: float
    a: float
    b: float
    s: float
    t: float


# ---------------------------------------------------------------------------
# scalar transforms
# ---------------------------------------------------------------------------


def eta_of_h(h, theta: float):
    """The substitution eta = (1 + theta*e^h)/(theta + e^h) = 1/w(e^h).

    Strictly decreasing for h >= 0 with range (theta, 1]; evaluated through
    exp(-|h|) so it never overflows, and exp underflow lands exactly on the
    limit value theta.  ``eta_of_h(0) = 1`` exactly.
    """
    if not 0.0 < theta < 1.0:
        raise InputDomainError("theta must be in (0, 1)")
    scalar = np.ndim(h) == 0
    hv = np.asarray(h, dtype=float)
    e = np.exp(-np.abs(hv))
    pos = (e + theta) / (theta * e + 1.0)  # h >= 0: multiplied through by e^-h
    neg = (1.0 + theta * e) / (theta + e)
    out = np.where(hv >= 0.0, pos, neg)
    return float(out) if scalar else out


def _log_w_of_h(h, theta: float):
    """W(h) = ln w(e^h) with w(x) = (x+theta)/(1+theta*x); odd in h."""
    return -np.log(eta_of_h(h, theta))


def aux_phi_h(h, prob: RootProblem):
    """Left minus right side of the root equation: W(v*W(h)) - r*v*h, h >= 0.

    Evaluated as a difference of two logaddexp terms so large |v| never
    overflows: with A = ln(theta + e^-h) and B = ln(1 + theta*e^-h),

        aux = logaddexp(v*A + ln(theta), v*B) - logaddexp(v*B + ln(theta), v*A) - r*v*h.

    ``B`` uses plain log, not log1p, so that A and B are bitwise equal at
    h = 0 and the value there is exactly 0.
    """
    scalar = np.ndim(h) == 0
    hv = np.asarray(h, dtype=float)
    if np.any(hv < 0.0):
        raise InputDomainError("aux_phi_h is defined for h >= 0")
    theta, v, r = prob.theta, prob.v, prob.r
    e = np.exp(-hv)
    a = np.log(theta + e)
    b = np.log(1.0 + theta * e)
    lth = math.log(theta)
    out = np.logaddexp(v * a + lth, v * b) - np.logaddexp(v * b + lth, v * a) - r * v * hv
    return float(out) if scalar else out


def _pow_or_inf(base: float, exponent: float) -> float:
    """base**exponent for base > 0, overflowing to inf instead of raising."""
    y = exponent * math.log(base)
    return math.inf if y > 709.0 else math.exp(y)


def h0_threshold(prob: RootProblem) -> float:
    """The bend point h0: aux_phi_h rises until h0 and falls (v > 1) after it.

    Found by solving r*(eta^|v| + eta^-|v|) + eta + 1/eta = (1-r)*(theta +
    1/theta) for the unique eta0 in (theta, 1) — the left side is convex
    with its minimum at eta = 1, hence strictly decreasing on (0, 1) — and
    mapping back through h0 = ln((1 - eta0*theta)/(eta0 - theta)).
    """
    theta, v, r = prob.theta, abs(prob.v), prob.r
    target = (1.0 - r) * (theta + 1.0 / theta)

    def gap(eta: float) -> float:
        return r * (_pow_or_inf(eta, v) + _pow_or_inf(eta, -v)) + eta + 1.0 / eta - target

    if gap(1.0) >= 0.0:
        raise NoRootError(
            "no bend point: r is at or beyond rho^2, where the interior root degenerates"
        )
    eta0 = bisect_root(gap, theta, 1.0, xtol=1e-15)
    h0 = math.log((1.0 - eta0 * theta) / (eta0 - theta))
    if not math.isfinite(h0):
        raise NoRootError("bend point beyond representable range (r too close to 0)")
    return h0


def _solve_root_h(prob: RootProblem) -> float:
    """The unique h > 0 with aux_phi_h(h) = 0, bracketed past the bend point."""
    h0 = h0_threshold(prob)
    f0 = aux_phi_h(h0, prob)
    if f0 == 0.0:
        raise NoRootError("degenerate bend point: no strictly interior root")
    hi = max(2.0 * h0, 1.0)
    f_hi = aux_phi_h(hi, prob)
    while f_hi * f0 > 0.0:
        hi *= 2.0
        if hi > 1e4:
            raise NoRootError("no sign change of the root equation up to h = 1e4")
        f_hi = aux_phi_h(hi, prob)
    return bisect_root(lambda h: aux_phi_h(h, prob), h0, hi, xtol=1e-15, f_lo=f0, f_hi=f_hi)


def solve_root_z(prob: RootProblem) -> float:
    """The unique z > 1 solving the stationarity root equation."""
    return math.exp(_solve_root_h(prob))


def count_roots_scan(prob: RootProblem, n: int = 1_000_000) -> int:
    """Sign changes of aux_phi_h on a logarithmic h-grid over (1e-8, 1e4).

    Independent of the bisection solver; exists to certify uniqueness of the
    root by brute force.  Grid points where the function is exactly zero are
    skipped rather than double-counted.
    """
    if n < 100_000:
        raise InputDomainError("n must be at least 1e5")
    h = np.geomspace(1e-8, 1e4, n)
    vals = aux_phi_h(h, prob)
    signs = np.sign(vals)
    signs = signs[signs != 0.0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


# ---------------------------------------------------------------------------
# coupling reconstruction
# ---------------------------------------------------------------------------

_CASE_Y_SIGN = {"forward": +1.0, "reverse": -1.0, "mixed": +1.0}


def _case_regime_ok(case: str, qp: QParam) -> bool:
    if case == "forward":
        return qp.p >= 1.0 and qp.q >= 1.0
    if case == "reverse":
        return 0.0 < qp.p <= 1.0 and 0.0 < qp.q <= 1.0
    if case == "mixed":
        return 0.0 < qp.p <= 1.0 and qp.q < 0.0
    raise InputDomainError(f"unknown case {case!r}; expected forward, reverse or mixed")


def _reconstruct_from_h(h_a: float, qp: QParam, params: DsbsParams, case: str) -> StationaryPoint:
    theta = params.theta
    h_b = qp.v * float(_log_w_of_h(h_a, theta))
    lth = math.log(theta)
    l00, l01, l10, l11 = h_a + h_b, h_a + lth, h_b + lth, 0.0
    log_cells = np.array([l00, l01, l10, l11])
    cells = np.exp(log_cells - logsumexp(log_cells))
    cells /= cells.sum()

    lx0 = np.logaddexp(l00, l01)
    lx1 = np.logaddexp(l10, l11)
    ly0 = np.logaddexp(l00, l10)
    ly1 = np.logaddexp(l01, l11)
    if lx0 < lx1 - _SIGN_SLACK:
        raise InconsistencyError(f"{case} case expects the X-marginal ratio to be >= 1")
    y_sign = _CASE_Y_SIGN[case]
    if y_sign * (ly0 - ly1) < -_SIGN_SLACK:
        rel = ">= 1" if y_sign > 0 else "<= 1"
        raise InconsistencyError(f"{case} case expects the Y-marginal ratio to be {rel}")

    residual_x = abs((lx0 - lx1) / qp.p - h_a)
    residual_y = abs((ly0 - ly1) / qp.q - h_b)
    if max(residual_x, residual_y) > 1e-6:
        raise InconsistencyError(
            f"stationarity residuals ({residual_x:.3e}, {residual_y:.3e}) exceed 1e-6: "
            "z is not a root for these parameters"
        )

    coupling = Coupling2x2(*cells)
    a = cells[2] + cells[3]  # X-marginal mass on 1; <= 1/2 in every case
    b1 = cells[1] + cells[3]  # Y-marginal mass on 1
    # d2 is symmetric about 1/2, so the reverse case's reflection b -> 1-b
    # changes which bias is reported, never the deficit value.
    return StationaryPoint(
        z=math.exp(h_a),
        coupling=coupling,
        s=float(d2(a)),
        t=float(d2(b1)),
        residual_x=residual_x,
        residual_y=residual_y,
    )


def reconstruct_coupling(
    z: float, qp: QParam, params: DsbsParams, case: str = "forward"
) -> StationaryPoint:
    """Coupling with cells proportional to (y*z, z*theta, y*theta, 1), y = w(z)^v.

    ``z`` must come from the case's root problem (see the module table);
    both stationarity conditions are re-derived from the cells in log space
    and their residuals checked.  ``z = 1`` is accepted and reproduces the
    source matrix itself with (s, t) = (0, 0).
    """
    if not _case_regime_ok(case, qp):
        raise InputDomainError(f"(p, q)=({qp.p!r}, {qp.q!r}) is outside the {case} regime")
    if not math.isfinite(qp.v) or qp.q == 0.0:
        raise InputDomainError("reconstruction needs finite v: q must differ from 1 and 0")
    if not z >= 1.0 - 1e-12:
        raise InputDomainError(f"z={z!r} must be >= 1")
    return _reconstruct_from_h(max(math.log(z), 0.0), qp, params, case)


def stationary_point(qp: QParam, params: DsbsParams, case: str = "forward") -> StationaryPoint:
    """Solve the case's root problem and reconstruct its stationary coupling.

    forward: solves whichever of the v-side / u-side problems has the larger
    exponent magnitude (they are equivalent; |exponent| > 1 is required by
    the root analysis, and max(|u|, |v|) = 1/min... their product is 1/r > 1
    so at least one side qualifies; ties prefer v).  reverse: v < -1 always,
    solved directly.  mixed: u < -1 always; the root is the negative-branch
    Y-side variable, so ln z = -u * W(h*) with h* the root.
    """
    if not _case_regime_ok(case, qp):
        raise InputDomainError(f"(p, q)=({qp.p!r}, {qp.q!r}) is outside the {case} regime")
    theta, r = params.theta, qp.r
    if case == "forward":
        if abs(qp.v) >= abs(qp.u):
            h_a = _solve_root_h(RootProblem(theta, qp.v, r))
        else:
            h_star = _solve_root_h(RootProblem(theta, qp.u, r))
            h_a = qp.u * float(_log_w_of_h(h_star, theta))
    elif case == "reverse":
        if not math.isfinite(qp.v) or not math.isfinite(qp.u):
            raise InputDomainError("reverse stationary point needs p, q strictly inside (0, 1)")
        h_a = _solve_root_h(RootProblem(theta, qp.v, r))
    else:  # mixed
        if not math.isfinite(qp.u):
            raise InputDomainError("mixed stationary point needs p strictly below 1")
        h_star = _solve_root_h(RootProblem(theta, qp.u, r))
        # Negative branch: h_b = -h*, hence h_a = u*W(-h*) = -u*W(h*) > 0.
        h_a = -qp.u * float(_log_w_of_h(h_star, theta))
    return _reconstruct_from_h(h_a, qp, params, case)


# ---------------------------------------------------------------------------
# Lagrangian sweeps
# ---------------------------------------------------------------------------


def hypercontractive_regime(qp: QParam, params: DsbsParams) -> bool:
    """True iff r = (p-1)(q-1) strictly exceeds rho^2 (boundary excluded)."""
    return qp.r > params.rho * params.rho


def _refine_2d(f, a0: float, b0: float, ha: float, hb: float, lo_b: float, hi_b: float):
    """Nested golden refinement of a 2-D grid argmin within +-2 cells."""

    def inner(a: float):
        return golden_min(lambda b: f(a, b), max(lo_b, b0 - 2 * hb), min(hi_b, b0 + 2 * hb), xtol=1e-10)

    a_ref, _ = golden_min(lambda a: inner(a)[1], max(0.0, a0 - 2 * ha), min(0.5, a0 + 2 * ha), xtol=1e-10)
    b_ref, f_ref = inner(a_ref)
    return a_ref, b_ref, f_ref


def gamma_extremum(
    qp: QParam, params: DsbsParams, problem: str, n: int = 401
) -> GammaExtremum:
    """Brute-force extremum of the case's Lagrangian sweep on an n-by-n grid.

    forward_min  — min over (a, b) in [0,1/2]^2 of the monotone-envelope
                   surface minus lam*d2(a) + mu*d2(b); requires p, q >= 1.
    reverse_max  — max over a in [0,1/2], b in [1/2,1] of the surface minus
                   the same linear terms; requires 0 < p, q <= 1.
    mixed_maxmin — max over a of [min over b of surface - mu*d2(b)] minus
                   lam*d2(a), both axes on [0,1/2]; requires 0 < p <= 1, q < 0.

    The winning grid cell is golden-refined (+-2 cells, nested per axis) and
    the reported value never exceeds (min) / falls below (max) the grid
    optimum.  First-index argmin keeps reports deterministic.
    """
    if n < 101:
        raise InputDomainError("n must be at least 101")
    lam, mu = qp.lam, qp.mu
    axis = np.linspace(0.0, 0.5, n)
    h = 0.5 / (n - 1)
    d2_axis = np.asarray(d2(axis))

    if problem == "forward_min":
        if not (qp.p >= 1.0 and qp.q >= 1.0):
            raise InputDomainError("forward_min requires p, q >= 1")
        grid = (
            phi_tilde_ab(axis[:, None], axis[None, :], params)
            - lam * d2_axis[:, None]
            - mu * d2_axis[None, :]
        )
        i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
        fn = lambda a, b: float(phi_tilde_ab(a, b, params)) - lam * float(d2(a)) - mu * float(d2(b))
        a_ref, b_ref, f_ref = _refine_2d(fn, axis[i], axis[j], h, h, 0.0, 0.5)
        if f_ref < grid[i, j]:
            a_opt, b_opt, value = a_ref, b_ref, f_ref
        else:
            a_opt, b_opt, value = float(axis[i]), float(axis[j]), float(grid[i, j])
        return GammaExtremum(value, a_opt, b_opt, float(d2(a_opt)), float(d2(b_opt)))

    if problem == "reverse_max":
        if not (0.0 < qp.p <= 1.0 and 0.0 < qp.q <= 1.0):
            raise InputDomainError("reverse_max requires 0 < p, q <= 1")
        axis_b = np.linspace(0.5, 1.0, n)
        d2_b = np.asarray(d2(axis_b))
        grid = (
            dd2_value(axis[:, None], axis_b[None, :], params)
            - lam * d2_axis[:, None]
            - mu * d2_b[None, :]
        )
        i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)
        neg = lambda a, b: -(float(dd2_value(a, b, params)) - lam * float(d2(a)) - mu * float(d2(b)))

        def inner(a: float):
            return golden_min(
                lambda b: neg(a, b), max(0.5, axis_b[j] - 2 * h), min(1.0, axis_b[j] + 2 * h), xtol=1e-10
            )

        a_ref, _ = golden_min(
            lambda a: inner(a)[1], max(0.0, axis[i] - 2 * h), min(0.5, axis[i] + 2 * h), xtol=1e-10
        )
        b_ref, negf = inner(a_ref)
        if -negf > grid[i, j]:
            a_opt, b_opt, value = a_ref, b_ref, -negf
        else:
            a_opt, b_opt, value = float(axis[i]), float(axis_b[j]), float(grid[i, j])
        return GammaExtremum(value, a_opt, b_opt, float(d2(a_opt)), float(d2(b_opt)))

    if problem == "mixed_maxmin":
        if not (0.0 < qp.p <= 1.0 and qp.q < 0.0):
            raise InputDomainError("mixed_maxmin requires 0 < p <= 1 and q < 0")
        surface = dd2_value(axis[:, None], axis[None, :], params) - mu * d2_axis[None, :]
        idx = np.argmin(surface, axis=1)
        lo = axis[np.maximum(idx - 1, 0)]
        hi = axis[np.minimum(idx + 1, n - 1)]
        b_ref, f_ref = golden_min_vec(
            lambda b: dd2_value(axis, b, params) - mu * np.asarray(d2(b)), lo, hi, xtol=1e-10
        )
        row_min = np.take_along_axis(surface, idx[:, None], axis=1)[:, 0]
        improved = f_ref < row_min
        inner_val = np.where(improved, f_ref, row_min)
        inner_b = np.where(improved, b_ref, axis[idx])
        outer = inner_val - lam * d2_axis
        i = int(np.argmax(outer))

        def inner_scalar(a: float):
            vals = dd2_value(np.full(n, a), axis, params) - mu * d2_axis
            jj = int(np.argmin(vals))
            b_r, f_r = golden_min(
                lambda b: float(dd2_value(a, b, params)) - mu * float(d2(b)),
                max(0.0, axis[jj] - h),
                min(0.5, axis[jj] + h),
                xtol=1e-10,
            )
            if f_r < vals[jj]:
                return b_r, f_r
            return float(axis[jj]), float(vals[jj])

        a_ref, _ = golden_min(
            lambda a: -(inner_scalar(a)[1] - lam * float(d2(a))),
            max(0.0, axis[i] - 2 * h),
            min(0.5, axis[i] + 2 * h),
            xtol=1e-10,
        )
        b_at_ref, f_at_ref = inner_scalar(a_ref)
        if f_at_ref - lam * float(d2(a_ref)) > outer[i]:
            a_opt, b_opt, value = a_ref, b_at_ref, f_at_ref - lam * float(d2(a_ref))
        else:
            a_opt, b_opt, value = float(axis[i]), float(inner_b[i]), float(outer[i])
        return GammaExtremum(value, a_opt, b_opt, float(d2(a_opt)), float(d2(b_opt)))

    raise InputDomainError(
        f"unknown problem {problem!r}; expected forward_min, reverse_max or mixed_maxmin"
    )
