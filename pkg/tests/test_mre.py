"""Minimum-divergence surface: closed-form minimizer vs brute-force oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsbs_envelopes import DsbsParams, FeasibilityError, dd2, dd2_oracle, p_star, region_sample
from dsbs_envelopes.mre import _dd2_oracle_batch, d2ab, dd2_value

RHO = DsbsParams(0.9)

# Reference values computed with mpmath at mp.dps = 50 (quadratic solved in
# 50-digit arithmetic, then the coupling divergence summed exactly).
FROZEN = [
    # (a, b, rho, p_star, dd2)
    (0.3, 0.4, 0.9, 0.29534588842286665, 0.19638665526752514),
    (0.2, 0.7, 0.5, 0.18822195572317882, 0.70399083947857632),
    (0.45, 0.05, 0.1, 0.027249519328164765, 0.71367595169442732),
    (0.11, 0.11, 0.9, 0.094839766350514737, 0.5284912604339468),
]

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@pytest.mark.parametrize("a, b, rho, p_ref, v_ref", FROZEN)
def test_frozen_minimizers(a, b, rho, p_ref, v_ref):
    params = DsbsParams(rho)
    res = dd2(a, b, params)
    assert res.p_star == pytest.approx(p_ref, abs=1e-14)
    assert res.value == pytest.approx(v_ref, abs=1e-14)


@pytest.mark.parametrize("a, b, rho, p_ref, v_ref", FROZEN)
def test_oracle_agrees_on_frozen_points(a, b, rho, p_ref, v_ref):
    # independent route: grid scan plus parabolic polish, no quadratic formula
    params = DsbsParams(rho)
    assert dd2_oracle(a, b, params) == pytest.approx(v_ref, abs=1e-10)


def test_exact_anchors():
    # forced values: independent marginals, the source itself, and perfect
    # disagreement
    assert dd2(0.5, 0.5, RHO).value == pytest.approx(0.0, abs=1e-12)
    assert p_star(0.5, 0.5, RHO) == pytest.approx((1 + 0.9) / 4, abs=1e-12)
    assert dd2(0.0, 0.0, RHO).value == pytest.approx(2 - math.log2(1.9), abs=1e-12)
    assert dd2(0.0, 1.0, RHO).value == pytest.approx(2 - math.log2(0.1), abs=1e-12)


def test_coupling_witness_consistency():
    res = dd2(0.3, 0.4, RHO)
    q = res.coupling
    assert q.x_marginal().p1 == pytest.approx(0.3, abs=1e-12)
    assert q.y_marginal().p1 == pytest.approx(0.4, abs=1e-12)
    assert q.q11 == pytest.approx(res.p_star, abs=1e-15)


@given(probs, probs)
@settings(max_examples=500, deadline=None)
def test_p_star_feasible_and_stationary(a, b):
    p = p_star(a, b, RHO)
    lo = max(0.0, a + b - 1.0)
    hi = min(a, b)
    assert lo - 1e-12 <= p <= hi + 1e-12
    # value at p_star never exceeds the endpoint values
    v = dd2_value(a, b, RHO)
    for endpoint in (lo, hi):
        assert v <= d2ab(a, b, endpoint, RHO) + 1e-12


@given(probs, probs)
@settings(max_examples=200, deadline=None)
def test_dd2_symmetric_in_marginals(a, b):
    assert dd2_value(a, b, RHO) == pytest.approx(dd2_value(b, a, RHO), abs=1e-12)


@given(probs, probs, st.sampled_from([0.1, 0.5, 0.9]))
@settings(max_examples=200, deadline=None)
def test_dd2_nonnegative(a, b, rho):
    assert dd2_value(a, b, DsbsParams(rho)) >= -1e-15


def test_batch_oracle_matches_closed_form():
    rng = np.random.default_rng(11)
    a = rng.uniform(0.0, 1.0, 300)
    b = rng.uniform(0.0, 1.0, 300)
    p_o, v_o = _dd2_oracle_batch(a, b, RHO)
    assert np.max(np.abs(p_star(a, b, RHO) - p_o)) <= 1e-9
    assert np.max(np.abs(dd2_value(a, b, RHO) - v_o)) <= 1e-9


def test_d2ab_rejects_infeasible_p():
    with pytest.raises(FeasibilityError):
        d2ab(0.3, 0.4, 0.35, RHO)  # p > min(a, b)
    with pytest.raises(FeasibilityError):
        d2ab(0.7, 0.8, 0.45, RHO)  # p < a + b - 1


def test_region_sample_surface():
    pts = region_sample(RHO, 16)
    assert len(pts) == 16 * 16
    for pt in pts[:8]:
        assert 0.0 <= pt.x <= 1.0
        assert 0.0 <= pt.y <= 1.0
        assert pt.z >= -1e-15
