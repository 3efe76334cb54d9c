"""Grid hulls and curvature certificates on synthetic functions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsbs_envelopes import (
    GridFn,
    InputDomainError,
    check_midpoint_concave,
    check_midpoint_convex,
    check_monotone,
    check_slope_bounds,
    legendre_envelope_1d,
    legendre_envelope_2d,
    lower_convex_envelope,
    upper_concave_envelope,
)


def _grid(fn, n=101):
    x = np.linspace(0.0, 1.0, n)
    return GridFn(fn(x))


def _grid2(fn, n=41):
    x = np.linspace(0.0, 1.0, n)
    return GridFn(fn(x[:, None], x[None, :]))


def test_gridfn_validation():
    with pytest.raises(InputDomainError):
        GridFn(np.zeros((4, 5)))
    with pytest.raises(InputDomainError):
        GridFn(np.array([1.0, 2.0]))
    with pytest.raises(InputDomainError):
        GridFn(np.array([1.0, np.nan, 2.0]))
    with pytest.raises(InputDomainError):
        GridFn(np.zeros((3, 3, 3)))


def test_convex_function_is_its_own_envelope():
    f = _grid(lambda x: (x - 0.3) ** 2)
    env = lower_convex_envelope(f)
    np.testing.assert_allclose(env.values, f.values, atol=1e-12)


def test_double_well_bridged():
    # w has two minima at 0.2 and 0.8; the hull must bridge them linearly
    f = _grid(lambda x: ((x - 0.2) * (x - 0.8)) ** 2)
    env = lower_convex_envelope(f)
    assert np.all(env.values <= f.values + 1e-12)
    i = np.argmin(np.abs(f.axis() - 0.5))
    assert env.values[i] == pytest.approx(0.0, abs=1e-12)  # on the bridge
    rep = check_midpoint_convex(env, tol=1e-9)
    assert rep.passed


def test_upper_concave_envelope_mirrors():
    f = _grid(lambda x: np.abs(x - 0.5))
    upper = upper_concave_envelope(f)
    lower = lower_convex_envelope(GridFn(-f.values))
    np.testing.assert_allclose(upper.values, -lower.values, atol=1e-14)
    # hull of the vee from above is the chord through the endpoints
    np.testing.assert_allclose(upper.values, 0.5 * np.ones(f.n), atol=1e-12)


def test_legendre_1d_matches_geometric_hull():
    # dual route for the same object: biconjugate vs monotone chain
    f = _grid(lambda x: np.sin(3.0 * np.pi * x) + 2.0 * x)
    geo = lower_convex_envelope(f)
    alg = legendre_envelope_1d(f)
    assert np.max(np.abs(geo.values - alg.values)) <= 1e-10


def test_legendre_2d_lower_bounds_geometric_hull():
    # the finite slope family gives a slightly slack hull, never a tighter one
    f = _grid2(lambda x, y: (x - 0.5) ** 2 * (y - 0.5) ** 2)
    geo = lower_convex_envelope(f)
    alg = legendre_envelope_2d(f, n_slopes=257)
    assert np.all(alg.values <= geo.values + 1e-9)
    assert np.max(geo.values - alg.values) <= 5e-3


def test_envelope_idempotent_2d():
    f = _grid2(lambda x, y: np.cos(2 * np.pi * x) * np.cos(2 * np.pi * y), n=33)
    env = lower_convex_envelope(f)
    again = lower_convex_envelope(env)
    assert np.max(np.abs(env.values - again.values)) <= 1e-10


def test_midpoint_convex_accepts_and_rejects():
    good = check_midpoint_convex(_grid(lambda x: x**2), tol=1e-9)
    assert good.passed and good.worst_violation <= 1e-9

    # a bump on a linear base: no curvature slack to hide in, so the
    # midpoint defect is the bump height itself
    vals = np.linspace(0.0, 1.0, 101).copy()
    vals[50] += 1e-6
    bad = check_midpoint_convex(GridFn(vals), tol=1e-9)
    assert not bad.passed
    assert bad.worst_violation == pytest.approx(1e-6, rel=1e-2)
    assert bad.witness is not None


def test_midpoint_convex_2d_full_enumeration():
    rep = check_midpoint_convex(_grid2(lambda x, y: x**2 + y**2 + x * y, n=21), tol=1e-9)
    assert rep.passed
    # saddle is not convex and the full sweep must find it
    rep2 = check_midpoint_convex(_grid2(lambda x, y: x * y - x**2 - y**2, n=21), tol=1e-9)
    assert not rep2.passed


def test_midpoint_concave_mirrors_convex():
    rep = check_midpoint_concave(_grid(lambda x: -((x - 0.4) ** 2)), tol=1e-9)
    assert rep.passed


def test_midpoint_subsampled_2d_catches_gross_violation():
    x = np.linspace(0.0, 1.0, 301)
    vals = x[:, None] ** 2 + x[None, :] ** 2
    vals[150, 150] += 0.5
    rep = check_midpoint_convex(GridFn(vals), tol=1e-9, max_pairs=2_000_000, seed=3)
    assert not rep.passed


@given(st.integers(min_value=3, max_value=40))
@settings(max_examples=30, deadline=None)
def test_envelope_below_and_convex(n):
    rng = np.random.default_rng(n)
    f = GridFn(rng.uniform(0.0, 1.0, n))
    env = lower_convex_envelope(f)
    assert np.all(env.values <= f.values + 1e-12)
    assert check_midpoint_convex(env, tol=1e-9).passed


def test_slope_bounds_conventions():
    # f(x) = x/2 has all quotients 1/2: passes <= 1, fails >= 1 by 1/2
    f = _grid(lambda x: 0.5 * x)
    le = check_slope_bounds(f, axis=0, bound=1.0, sense="le")
    assert le.passed and le.worst_violation == pytest.approx(-0.5, abs=1e-12)
    ge = check_slope_bounds(f, axis=0, bound=1.0, sense="ge")
    assert not ge.passed
    assert ge.worst_violation == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(InputDomainError):
        check_slope_bounds(f, axis=1, bound=1.0, sense="le")
    with pytest.raises(InputDomainError):
        check_slope_bounds(f, axis=0, bound=1.0, sense="between")


def test_slope_bounds_2d_axis_selection():
    f = _grid2(lambda x, y: 2.0 * x + 0.25 * y, n=11)
    assert check_slope_bounds(f, axis=0, bound=1.0, sense="ge").passed
    assert check_slope_bounds(f, axis=1, bound=1.0, sense="le").passed
    assert not check_slope_bounds(f, axis=0, bound=1.0, sense="le").passed


def test_monotone_check():
    good = check_monotone(_grid(lambda x: x**3))
    assert good.passed
    vals = np.linspace(0.0, 1.0, 50) ** 2
    vals[20] = vals[19] - 1e-8
    bad = check_monotone(GridFn(vals))
    assert not bad.passed
    assert bad.witness[0] == 0  # axis of the drop
