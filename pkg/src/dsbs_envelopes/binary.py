"""Primitives for a symmetric pair of correlated bits.

The source model throughout this package is a uniformly random bit ``X``
observed through a symmetric bit-flipping channel with flip probability
``(1 - rho) / 2``, so the pair ``(X, Y)`` has joint distribution

    P = [[ (1+rho)/4, (1-rho)/4 ],
         [ (1-rho)/4, (1+rho)/4 ]]

with correlation coefficient ``rho`` in (0, 1).

Conventions
-----------
* All entropies and divergences are in bits (base-2 logarithms), and
  ``0 * log 0`` is evaluated as 0.
* Probability arguments are validated with an absolute slack of 1e-12 and
  clipped back into [0, 1]; anything further out raises
  :class:`~dsbs_envelopes.errors.InputDomainError`.
* The free functions are array-polymorphic: they accept floats or numpy
  arrays and return matching shapes (python floats for scalar input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .errors import InputDomainError

__all__ = [
    "DsbsParams",
    "BinaryDist",
    "Coupling2x2",
    "h2",
    "h2_inv",
    "d2",
    "d2_inv",
    "bconv",
    "bdeconv",
    "kl_binary",
    "kl_joint",
]

_LN2 = math.log(2.0)
_SLACK = 1e-12  # absolute slack accepted (and clipped) on probability inputs


def _prepare_prob(x, name: str) -> np.ndarray:
    """Validate an array-or-scalar probability and clip it into [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputDomainError(f"{name} must be finite")
    if np.any(arr < -_SLACK) or np.any(arr > 1.0 + _SLACK):
        bad = float(np.ravel(arr)[int(np.argmax((arr < -_SLACK) | (arr > 1.0 + _SLACK)))])
        raise InputDomainError(f"{name}={bad!r} lies outside [0, 1]")
    return np.clip(arr, 0.0, 1.0)


def _scalarize(arr: np.ndarray, scalar_in: bool):
    return float(np.asarray(arr).item()) if scalar_in else arr


def _require_prob_scalar(x: float, name: str) -> float:
    if not math.isfinite(x):
        raise InputDomainError(f"{name} must be finite")
    if x < -_SLACK or x > 1.0 + _SLACK:
        raise InputDomainError(f"{name}={x!r} lies outside [0, 1]")
    return min(max(x, 0.0), 1.0)


# ---------------------------------------------------------------------------
# entropy-like primitives
# ---------------------------------------------------------------------------


def _h2_raw(p: np.ndarray) -> np.ndarray:
    return -(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)) / _LN2


def h2(a):
    """Entropy of a bit with bias ``a``, in bits.  ``h2(0) = h2(1) = 0``."""
    scalar = np.ndim(a) == 0
    p = _prepare_prob(a, "a")
    return _scalarize(_h2_raw(p), scalar)


def h2_inv(y):
    """Inverse of :func:`h2` on the branch [0, 1/2].

    Solved by bisection (64 fixed halvings, final width < 1e-18, well below
    the documented 1e-12 guarantee).  Endpoints are exact: ``h2_inv(0) = 0``
    and ``h2_inv(1) = 1/2``.
    """
    scalar = np.ndim(y) == 0
    yv = _prepare_prob(y, "y")
    lo = np.zeros_like(yv)
    hi = np.full_like(yv, 0.5)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = _h2_raw(mid) < yv
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(yv <= 0.0, 0.0, np.where(yv >= 1.0, 0.5, out))
    return _scalarize(out, scalar)


def d2(a):
    """Entropy deficit of a bit with bias ``a``: ``1 - h2(a)``, in bits.

    Evaluated in the numerically stable direct form
    ``a*log2(2a) + (1-a)*log2(2-2a)``, which keeps full precision when the
    deficit is tiny (``a`` near 1/2).
    """
    scalar = np.ndim(a) == 0
    p = _prepare_prob(a, "a")
    out = (xlogy(p, 2.0 * p) + xlogy(1.0 - p, 2.0 - 2.0 * p)) / _LN2
    return _scalarize(out, scalar)


def d2_inv(s):
    """Inverse of :func:`d2` on the branch [0, 1/2]: ``h2_inv(1 - s)``."""
    scalar = np.ndim(s) == 0
    sv = _prepare_prob(s, "s")
    return _scalarize(np.asarray(h2_inv(1.0 - sv)), scalar)


# ---------------------------------------------------------------------------
# binary convolution
# ---------------------------------------------------------------------------


def bconv(x, y):
    """Bias of the XOR of independent bits with biases ``x`` and ``y``."""
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    xv = _prepare_prob(x, "x")
    yv = _prepare_prob(y, "y")
    return _scalarize(xv + yv - 2.0 * xv * yv, scalar)


def bdeconv(z, y):
    """Bias ``x`` with ``bconv(x, y) = z``; singular at ``y = 1/2``."""
    scalar = np.ndim(z) == 0 and np.ndim(y) == 0
    zv = _prepare_prob(z, "z")
    yv = _prepare_prob(y, "y")
    if np.any(np.abs(yv - 0.5) <= _SLACK):
        raise InputDomainError("bdeconv is singular at y = 1/2")
    return _scalarize((zv - yv) / (1.0 - 2.0 * yv), scalar)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class DsbsParams:
    """Parameters of the symmetric binary pair with correlation ``rho``.

    Derived quantities: ``theta = (1-rho)/(1+rho)`` is the odds of a
    disagreeing pair against an agreeing one, and ``k = 1/theta**2`` is the
    cross ratio of the joint matrix.  ``rho`` must stay away from the
    degenerate ends: the admissible range is (1e-6, 1 - 1e-6).
    """

    rho: float
    k: float = field(init=False)
    theta: float = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.rho, (int, float)) or not math.isfinite(self.rho):
            raise InputDomainError("rho must be a finite real number")
        if not 1e-6 < self.rho < 1.0 - 1e-6:
            raise InputDomainError(
                f"rho={self.rho!r} outside the supported open interval (1e-06, 1 - 1e-06)"
            )
        theta = (1.0 - self.rho) / (1.0 + self.rho)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "k", ((1.0 + self.rho) / (1.0 - self.rho)) ** 2)

    @property
    def crossover(self) -> float:
        """Flip probability (1 - rho)/2 of the channel from X to Y."""
        return 0.5 * (1.0 - self.rho)

    def joint_cells(self) -> np.ndarray:
        """Joint cells as the flat array (p00, p01, p10, p11)."""
        agree = 0.25 * (1.0 + self.rho)
        differ = 0.25 * (1.0 - self.rho)
        return np.array([agree, differ, differ, agree])

    def joint(self) -> "Coupling2x2":
        """The joint distribution of the pair as a :class:`Coupling2x2`."""
        agree = 0.25 * (1.0 + self.rho)
        differ = 0.25 * (1.0 - self.rho)
        return Coupling2x2(agree, differ, differ, agree)


@dataclass(frozen=True, slots=True)
class BinaryDist:
    """Distribution of one bit, stored as ``p1 = P(bit = 1)``."""

    p1: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p1", _require_prob_scalar(self.p1, "p1"))

    @property
    def p0(self) -> float:
        return 1.0 - self.p1

    @classmethod
    def uniform(cls) -> "BinaryDist":
        return cls(0.5)


@dataclass(frozen=True, slots=True)
class Coupling2x2:
    """Joint distribution of two bits; cell ``qij = P(X=i, Y=j)``."""

    q00: float
    q01: float
    q10: float
    q11: float

    def __post_init__(self) -> None:
        for name in ("q00", "q01", "q10", "q11"):
            object.__setattr__(self, name, _require_prob_scalar(getattr(self, name), name))
        total = self.q00 + self.q01 + self.q10 + self.q11
        if abs(total - 1.0) > 1e-12:
            raise InputDomainError(f"coupling cells sum to {total!r}, expected 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.q00, self.q01, self.q10, self.q11])

    def x_marginal(self) -> BinaryDist:
        return BinaryDist(self.q10 + self.q11)

    def y_marginal(self) -> BinaryDist:
        return BinaryDist(self.q01 + self.q11)


# ---------------------------------------------------------------------------
# divergences
# ---------------------------------------------------------------------------


def kl_binary(q: BinaryDist, p: BinaryDist, *, strict: bool = False) -> float:
    """Relative entropy D(q || p) of two bit distributions, in bits.

    When ``q`` puts mass where ``p`` has none the divergence is infinite; by
    default that returns ``math.inf``, with ``strict=True`` it raises
    :class:`InputDomainError` instead.
    """
    total = 0.0
    for qm, pm in ((q.p0, p.p0), (q.p1, p.p1)):
        if qm == 0.0:
            continue
        if pm <= 0.0:
            if strict:
                raise InputDomainError(
                    "relative entropy is infinite: q has mass outside the support of p"
                )
            return math.inf
        total += qm * math.log2(qm / pm)
    return total


def kl_joint(q: Coupling2x2, params: DsbsParams) -> float:
    """Relative entropy D(q || P) against the source joint matrix, in bits.

    The source matrix has full support, so the result is always finite.
    """
    qc = q.as_array()
    pc = params.joint_cells()
    return float(np.sum(xlogy(qc, qc / pc)) / _LN2)
