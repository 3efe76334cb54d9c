"""Scalar binary machinery: entropy, divergence, inverses, convolution."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsbs_envelopes import (
    BinaryDist,
    Coupling2x2,
    DsbsParams,
    InputDomainError,
    bconv,
    bdeconv,
    d2,
    d2_inv,
    h2,
    h2_inv,
    kl_binary,
    kl_joint,
)

# Reference values computed with mpmath at mp.dps = 50.
H2_011 = 0.499915958164528
H2_03 = 0.88129089923069262
D2_03 = 0.11870910076930738
D2_INV_04 = 0.14610240341188702
KL_03_07 = 0.48895696853457917
KL_UNIFORM_JOINT_09 = 1.1979643381655696  # = -log2(0.19)/2

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
inner_probs = st.floats(min_value=1e-9, max_value=0.5 - 1e-9)


def test_h2_frozen_values():
    assert h2(0.11) == pytest.approx(H2_011, abs=1e-15)
    assert h2(0.3) == pytest.approx(H2_03, abs=1e-15)
    assert h2(0.5) == 1.0
    assert h2(0.0) == 0.0
    assert h2(1.0) == 0.0


def test_d2_frozen_values():
    assert d2(0.3) == pytest.approx(D2_03, abs=1e-15)
    assert d2(0.5) == 0.0
    assert d2(0.0) == 1.0
    assert d2(1.0) == 1.0
    assert d2_inv(0.4) == pytest.approx(D2_INV_04, abs=1e-13)


@given(probs)
def test_h2_symmetric(a):
    assert h2(a) == pytest.approx(h2(1.0 - a), abs=1e-12)


@given(probs)
def test_d2_complement(a):
    assert d2(a) + h2(a) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(min_value=1e-9, max_value=0.4999))
@settings(max_examples=300)
def test_h2_inv_round_trip(a):
    assert h2_inv(h2(a)) == pytest.approx(a, abs=1e-11)


@given(st.floats(min_value=0.4999, max_value=0.5))
def test_h2_inv_round_trip_flat_top(a):
    # h2 is quadratically flat at 1/2, so the inverse can only recover
    # a to ~sqrt(ulp) there; 1e-8 is the conditioning-limited bound.
    assert h2_inv(h2(a)) == pytest.approx(a, abs=1e-8)


@given(st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=300)
def test_d2_inv_round_trip(s):
    a = d2_inv(s)
    assert 0.0 <= a <= 0.5
    assert d2(a) == pytest.approx(s, abs=1e-11)


def test_h2_inv_is_left_branch():
    # the inverse always lands in [0, 1/2]
    assert h2_inv(0.0) == 0.0
    assert h2_inv(1.0) == pytest.approx(0.5, abs=1e-12)
    assert h2_inv(h2(0.9)) == pytest.approx(0.1, abs=1e-11)


def test_h2_rejects_out_of_range():
    with pytest.raises(InputDomainError):
        h2(1.2)
    with pytest.raises(InputDomainError):
        h2_inv(1.01)
    with pytest.raises(InputDomainError):
        d2_inv(-0.01)


def test_h2_vectorized():
    a = np.linspace(0.0, 1.0, 11)
    out = h2(a)
    assert out.shape == a.shape
    assert out[5] == 1.0


@given(probs, probs)
def test_bconv_range_and_symmetry(x, y):
    z = bconv(x, y)
    assert 0.0 <= z <= 1.0
    assert z == pytest.approx(bconv(y, x), abs=0.0)


@given(inner_probs, inner_probs)
@settings(max_examples=300)
def test_bdeconv_inverts_bconv(x, y):
    z = bconv(x, y)
    # deconvolution divides by (1 - 2y); the tolerance carries that factor
    tol = 1e-12 + 4e-15 / abs(1.0 - 2.0 * y)
    assert bdeconv(z, y) == pytest.approx(x, abs=tol)


def test_bconv_identity_elements():
    assert bconv(0.3, 0.0) == pytest.approx(0.3)
    assert bconv(0.3, 0.5) == pytest.approx(0.5)
    assert bconv(0.3, 1.0) == pytest.approx(0.7)


def test_kl_binary_frozen_value():
    assert kl_binary(BinaryDist(0.3), BinaryDist(0.7)) == pytest.approx(KL_03_07, abs=1e-14)
    assert kl_binary(BinaryDist(0.3), BinaryDist(0.3)) == 0.0


def test_kl_binary_absolute_continuity():
    # q puts mass where p has none: +inf unless strict, which raises
    assert kl_binary(BinaryDist(0.5), BinaryDist(0.0)) == math.inf
    with pytest.raises(InputDomainError):
        kl_binary(BinaryDist(0.5), BinaryDist(0.0), strict=True)


@given(inner_probs, inner_probs)
@settings(max_examples=200)
def test_kl_binary_nonnegative(p, q):
    assert kl_binary(BinaryDist(p), BinaryDist(q)) >= 0.0


def test_dsbs_params_fields():
    params = DsbsParams(0.9)
    assert params.theta == pytest.approx((1 - 0.9) / (1 + 0.9), abs=1e-15)
    assert params.k == pytest.approx(((1 + 0.9) / (1 - 0.9)) ** 2, abs=1e-9)
    assert params.k * params.theta**2 == pytest.approx(1.0, abs=1e-12)
    assert params.crossover == pytest.approx(0.05, abs=1e-15)
    np.testing.assert_allclose(
        params.joint_cells(), [0.475, 0.025, 0.025, 0.475], atol=1e-15
    )


def test_dsbs_params_rejects_degenerate_rho():
    for rho in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(InputDomainError):
            DsbsParams(rho)


def test_coupling_marginals_and_validation():
    q = Coupling2x2(0.4, 0.1, 0.2, 0.3)
    assert q.x_marginal().p1 == pytest.approx(0.5)
    assert q.y_marginal().p1 == pytest.approx(0.4)
    np.testing.assert_allclose(q.as_array(), [0.4, 0.1, 0.2, 0.3])
    with pytest.raises(InputDomainError):
        Coupling2x2(0.5, 0.5, 0.5, 0.5)


def test_kl_joint_against_source():
    params = DsbsParams(0.9)
    assert kl_joint(params.joint(), params) == 0.0
    uniform = Coupling2x2(0.25, 0.25, 0.25, 0.25)
    assert kl_joint(uniform, params) == pytest.approx(KL_UNIFORM_JOINT_09, abs=1e-14)
