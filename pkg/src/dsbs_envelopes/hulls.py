"""Discrete convex/concave envelopes and grid certifiers.

Functions here operate on samples over the uniform lattice of [0,1] or
[0,1]^2 wrapped in :class:`GridFn`.  Two independent envelope algorithms are
provided on purpose:

* :func:`lower_convex_envelope` — geometric route: the lower facets of the
  convex hull of the graph points (monotone chain in 1-D, Qhull in 2-D),
  interpolated back onto the lattice.  This is the production path.
* :func:`legendre_envelope_1d` / :func:`legendre_envelope_2d` — algebraic
  route: a double discrete Legendre transform (biconjugate).  The 1-D
  version uses every pairwise chord slope and is exact; the 2-D version uses
  a dense slope grid and lower-bounds the true envelope by a documented
  O(slope-spacing) margin.  These exist to cross-validate the hull route and
  never share code with it.

The certifiers (`check_midpoint_convex`, `check_midpoint_concave`,
`check_slope_bounds`, `check_monotone`) report the worst violation found and
a witness, with deterministic tie-breaking (fixed enumeration order, first
index wins), so failing runs are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import InputDomainError

__all__ = [
    "GridFn",
    "ConvexityReport",
    "lower_convex_envelope",
    "upper_concave_envelope",
    "legendre_envelope_1d",
    "legendre_envelope_2d",
    "check_midpoint_convex",
    "check_midpoint_concave",
    "check_slope_bounds",
    "check_monotone",
]

_FULL_ENUMERATION_MAX_N = 201  # 2-D full midpoint enumeration up to this n
_DEFAULT_SUBSAMPLE = 10_000_000


@dataclass(frozen=True)
class GridFn:
    """Samples of a function over the uniform lattice on [0,1]^dims.

    ``values`` is 1-D of length n, or 2-D n-by-n with axis 0 as the first
    coordinate; lattice point i maps to i/(n-1).
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim not in (1, 2):
            raise InputDomainError("GridFn values must be 1-D or 2-D")
        if arr.ndim == 2 and arr.shape[0] != arr.shape[1]:
            raise InputDomainError("2-D GridFn must be square")
        if arr.shape[0] < 3:
            raise InputDomainError("GridFn needs at least 3 points per axis")
        if not np.all(np.isfinite(arr)):
            raise InputDomainError("GridFn values must be finite")
        object.__setattr__(self, "values", arr)

    @property
    def dims(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def axis(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n)


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of one grid certification: passed ⇔ worst_violation ≤ tol."""

    passed: bool
    worst_violation: float
    witness: Optional[tuple]
    tol: float
    n_pairs: int


# ---------------------------------------------------------------------------
# envelopes — geometric route
# ---------------------------------------------------------------------------


def _lower_hull_1d(v: np.ndarray) -> np.ndarray:
    x = np.linspace(0.0, 1.0, v.size)
    hull: list[int] = []
    for i in range(v.size):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            cross = (x[k] - x[j]) * (v[i] - v[j]) - (v[k] - v[j]) * (x[i] - x[j])
            if cross <= 0.0:  # last vertex is above or on the chord: drop it
                hull.pop()
            else:
                break
        hull.append(i)
    env = np.interp(x, x[hull], v[hull])
    return np.minimum(env, v)


def _lower_hull_2d(v: np.ndarray) -> np.ndarray:
    n = v.shape[0]
    x = np.linspace(0.0, 1.0, n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel(), v.ravel()])
    try:
        hull = ConvexHull(pts)
    except QhullError:
        # All graph points coplanar: the function is affine, hence its own
        # envelope.
        return v.copy()
    eqs = hull.equations
    lower = eqs[:, 2] < -1e-12
    env = np.full((n, n), -np.inf)
    h = 1.0 / (n - 1)
    for simplex, (nx, ny, nz, off) in zip(hull.simplices[lower], eqs[lower]):
        px = pts[simplex, 0]
        py = pts[simplex, 1]
        i0 = max(0, math.ceil(px.min() / h - 1e-9))
        i1 = min(n - 1, math.floor(px.max() / h + 1e-9))
        j0 = max(0, math.ceil(py.min() / h - 1e-9))
        j1 = min(n - 1, math.floor(py.max() / h + 1e-9))
        if i1 < i0 or j1 < j0:
            continue
        plane = -(nx * x[i0 : i1 + 1, None] + ny * x[None, j0 : j1 + 1] + off) / nz
        np.maximum(env[i0 : i1 + 1, j0 : j1 + 1], plane, out=env[i0 : i1 + 1, j0 : j1 + 1])
    env = np.where(np.isneginf(env), v, env)
    return np.minimum(env, v)


def lower_convex_envelope(f: GridFn) -> GridFn:
    """Pointwise-largest convex minorant of f representable on the lattice.

    1-D: monotone-chain lower hull, interpolated across non-vertex points.
    2-D: lower facets of the 3-D convex hull of the graph; the envelope at a
    lattice point is the max over the lower facet planes whose projection
    covers it (every lower facet plane supports the hull from below, so the
    covering facet's plane is that maximum).  The result is clipped to
    ``min(env, f)`` so floating-point spill never breaks dominance.
    """
    if f.dims == 1:
        return GridFn(_lower_hull_1d(f.values))
    return GridFn(_lower_hull_2d(f.values))


def upper_concave_envelope(f: GridFn) -> GridFn:
    """Pointwise-smallest concave majorant: exact negation dual of the convex one."""
    return GridFn(-lower_convex_envelope(GridFn(-f.values)).values)


# ---------------------------------------------------------------------------
# envelopes — algebraic route (cross-validation oracles)
# ---------------------------------------------------------------------------


def legendre_envelope_1d(f: GridFn) -> GridFn:
    """Exact 1-D biconjugate: double discrete Legendre transform.

    The slope set is every pairwise chord slope of the samples, which
    contains every edge slope of the lower hull, so the biconjugate equals
    the discrete envelope exactly (up to rounding).  O(n^3) and independent
    of the monotone-chain route.
    """
    if f.dims != 1:
        raise InputDomainError("legendre_envelope_1d takes a 1-D GridFn")
    v = f.values
    x = f.axis()
    jj, kk = np.triu_indices(v.size, k=1)
    slopes = (v[kk] - v[jj]) / (x[kk] - x[jj])
    env = np.full_like(v, -np.inf)
    for start in range(0, slopes.size, 4096):
        s = slopes[start : start + 4096, None]
        conj = np.max(s * x[None, :] - v[None, :], axis=1, keepdims=True)
        np.maximum(env, np.max(s * x[None, :] - conj, axis=0), out=env)
    return GridFn(np.minimum(env, v))


def legendre_envelope_2d(f: GridFn, n_slopes: int = 513) -> GridFn:
    """Approximate 2-D biconjugate over a dense factorized slope grid.

    Slopes per axis span the forward-difference range.  Restricting the
    slope set can only lower the plane maximum, so the result lower-bounds
    the true discrete envelope, with a shortfall of order
    slope-spacing = (quotient range)/(n_slopes-1).  Use as an independent
    lower bracket for the hull route, not as a drop-in envelope.
    """
    if f.dims != 2:
        raise InputDomainError("legendre_envelope_2d takes a 2-D GridFn")
    v = f.values
    x = f.axis()
    n = v.shape[0]
    h = x[1] - x[0]

    def slope_axis(diffs: np.ndarray) -> np.ndarray:
        lo, hi = float(np.min(diffs)), float(np.max(diffs))
        if hi - lo < 1e-12:
            lo, hi = lo - 1.0, hi + 1.0
        return np.linspace(lo, hi, n_slopes)

    sx = slope_axis(np.diff(v, axis=0) / h)
    sy = slope_axis(np.diff(v, axis=1) / h)
    # conj[a, b] = max_{i,j} sx_a x_i + sy_b x_j - v_ij, factorized per axis
    # and chunked to keep the broadcast temporaries small.
    inner = np.empty((n_slopes, n))  # inner[b, i] = max_j sy_b x_j - v[i, j]
    for b0 in range(0, n_slopes, 64):
        b1 = min(b0 + 64, n_slopes)
        inner[b0:b1] = np.max(sy[b0:b1, None, None] * x[None, None, :] - v[None, :, :], axis=2)
    conj = np.empty((n_slopes, n_slopes))
    for a in range(n_slopes):
        conj[a] = np.max(sx[a] * x[None, :] + inner, axis=1)
    # env[i, j] = max_{a,b} sx_a x_i + sy_b x_j - conj[a, b], same trick back.
    back = np.empty((n, n_slopes))  # back[i, b] = max_a sx_a x_i - conj[a, b]
    for i0 in range(0, n, 16):
        i1 = min(i0 + 16, n)
        back[i0:i1] = np.max(sx[None, :, None] * x[i0:i1, None, None] - conj[None, :, :], axis=1)
    env = np.empty_like(v)
    for i in range(n):
        env[i] = np.max(back[i][:, None] + sy[:, None] * x[None, :], axis=0)
    return GridFn(np.minimum(env, v))


# ---------------------------------------------------------------------------
# certifiers
# ---------------------------------------------------------------------------


def _report(worst: float, witness, tol: float, n_pairs: int) -> ConvexityReport:
    return ConvexityReport(
        passed=bool(worst <= tol),
        worst_violation=float(worst),
        witness=witness,
        tol=float(tol),
        n_pairs=int(n_pairs),
    )


def _midpoint_convex_1d(v: np.ndarray, tol: float) -> ConvexityReport:
    n = v.size
    worst = -np.inf
    witness = None
    n_pairs = 0
    for d in range(1, (n - 1) // 2 + 1):
        viol = v[d : n - d] - 0.5 * (v[: n - 2 * d] + v[2 * d :])
        n_pairs += viol.size
        i = int(np.argmax(viol))
        if viol[i] > worst:
            worst = float(viol[i])
            witness = (i, i + 2 * d)
    return _report(worst, witness, tol, n_pairs)


def _midpoint_convex_2d_full(v: np.ndarray, tol: float) -> ConvexityReport:
    n = v.shape[0]
    worst = -np.inf
    witness = None
    n_pairs = 0
    half = (n - 1) // 2
    for di in range(0, half + 1):
        dj_start = 1 if di == 0 else -half
        for dj in range(dj_start, half + 1):
            if di == 0 and dj <= 0:
                continue
            adj = abs(dj)
            mid = v[di : n - di, adj : n - adj]
            left = v[0 : n - 2 * di, adj - dj : n - adj - dj]
            right = v[2 * di : n, adj + dj : n - adj + dj]
            viol = mid - 0.5 * (left + right)
            n_pairs += viol.size
            flat = int(np.argmax(viol))
            if viol.flat[flat] > worst:
                worst = float(viol.flat[flat])
                i, j = np.unravel_index(flat, viol.shape)
                witness = ((int(i), int(j + adj - dj)), (int(i + 2 * di), int(j + adj + dj)))
    return _report(worst, witness, tol, n_pairs)


def _midpoint_convex_2d_sampled(
    v: np.ndarray, tol: float, max_pairs: int, seed: int
) -> ConvexityReport:
    n = v.shape[0]
    rng = np.random.default_rng(seed)
    worst = -np.inf
    witness = None
    n_pairs = 0
    chunk = 1_000_000
    while n_pairs < max_pairs:
        m = min(chunk, max_pairs - n_pairs)
        i1 = rng.integers(0, n, m)
        j1 = rng.integers(0, n, m)
        i2 = rng.integers(0, n, m)
        j2 = rng.integers(0, n, m)
        keep = ((i1 + i2) % 2 == 0) & ((j1 + j2) % 2 == 0) & ((i1 != i2) | (j1 != j2))
        i1, j1, i2, j2 = i1[keep], j1[keep], i2[keep], j2[keep]
        if i1.size == 0:
            continue
        viol = v[(i1 + i2) // 2, (j1 + j2) // 2] - 0.5 * (v[i1, j1] + v[i2, j2])
        n_pairs += i1.size
        a = int(np.argmax(viol))
        if viol[a] > worst:
            worst = float(viol[a])
            witness = ((int(i1[a]), int(j1[a])), (int(i2[a]), int(j2[a])))
    return _report(worst, witness, tol, n_pairs)


def check_midpoint_convex(
    f: GridFn, tol: float, *, max_pairs: Optional[int] = None, seed: int = 0
) -> ConvexityReport:
    """Certify midpoint convexity on the lattice.

    Enumerates every sample pair whose midpoint is itself a lattice point and
    reports the worst ``f(mid) - (f(x)+f(y))/2``.  2-D enumeration is O(n^4);
    above n = 201 (or when ``max_pairs`` is given) pairs are subsampled with
    a seeded generator instead.  The report's witness is the first pair
    achieving the worst violation in a fixed enumeration order.
    """
    if tol <= 0.0:
        raise InputDomainError("tol must be positive")
    if f.dims == 1:
        return _midpoint_convex_1d(f.values, tol)
    if max_pairs is None and f.n <= _FULL_ENUMERATION_MAX_N:
        return _midpoint_convex_2d_full(f.values, tol)
    return _midpoint_convex_2d_sampled(f.values, tol, max_pairs or _DEFAULT_SUBSAMPLE, seed)


def check_midpoint_concave(
    f: GridFn, tol: float, *, max_pairs: Optional[int] = None, seed: int = 0
) -> ConvexityReport:
    """Midpoint concavity: the convex check applied to the negated samples."""
    return check_midpoint_convex(GridFn(-f.values), tol, max_pairs=max_pairs, seed=seed)


def check_slope_bounds(
    f: GridFn, axis: int, bound: float, sense: str, tol: float = 1e-8
) -> ConvexityReport:
    """Certify forward difference quotients along ``axis`` against ``bound``.

    ``sense`` is "le" (quotients ≤ bound + tol) or "ge" (≥ bound − tol).
    The reported violation is the worst signed excess past the bound.
    """
    if sense not in ("le", "ge"):
        raise InputDomainError("sense must be 'le' or 'ge'")
    if axis >= f.dims or axis < 0:
        raise InputDomainError(f"axis {axis} out of range for {f.dims}-D grid")
    h = 1.0 / (f.n - 1)
    quot = np.diff(f.values, axis=axis) / h
    excess = quot - bound if sense == "le" else bound - quot
    flat = int(np.argmax(excess))
    worst = float(excess.flat[flat])
    witness = tuple(int(c) for c in np.unravel_index(flat, excess.shape))
    return _report(worst, witness, tol, excess.size)


def check_monotone(f: GridFn, tol: float = 1e-10) -> ConvexityReport:
    """Certify nondecreasingness along every axis (forward differences ≥ -tol)."""
    worst = -np.inf
    witness = None
    total = 0
    for axis in range(f.dims):
        drop = -np.diff(f.values, axis=axis)
        total += drop.size
        flat = int(np.argmax(drop))
        if drop.flat[flat] > worst:
            worst = float(drop.flat[flat])
            witness = (axis,) + tuple(int(c) for c in np.unravel_index(flat, drop.shape))
    return _report(worst, witness, tol, total)
