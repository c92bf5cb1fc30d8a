import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bandtoep as bt
from bandtoep.measure import (LimitingMeasure, MomentProblemError, cauchy_transform, density_from_curve,
                              density_from_m, distribution_from_curve, jacobi_params, kolmogorov_distance,
                              nevai_limits_check, orthogonality_check, orthopoly_eval, weyl_m)
from bandtoep.oracles import fixtures, oracle_example3, oracle_fourdiag, oracle_tridiag
from bandtoep.toeplitz import NumericalError

FIX = fixtures()


@pytest.fixture(scope="module")
def tri_density():
    b = FIX["tridiag-a1"]
    return density_from_curve(b, bt.trace_polar(b, N=256))


@pytest.fixture(scope="module")
def four_density():
    b = FIX["fourdiag-a1"]
    return density_from_curve(b, bt.trace_polar(b, N=256))


def test_tridiag_jacobi_exact():
    p = jacobi_params(bt.moments(FIX["tridiag-a1"], 24, exact=True), 12)
    # the first off-diagonal is sqrt(2), the rest are 1
    assert p.a_sq == [2] + [1] * 11
    assert all(v == 0 for v in p.b_exact)


def test_tridiag_orthopolys_are_shifted_chebyshev():
    p = jacobi_params(bt.moments(FIX["tridiag-a1"], 20, exact=True), 10)
    x = np.linspace(-1.9, 1.9, 23)
    T = lambda n: np.polynomial.chebyshev.Chebyshev.basis(n)
    # monic p_n = U_n(x/2) - U_{n-2}(x/2) for n >= 2, i.e. 2 T_n(x/2)
    for n in range(2, 10):
        assert np.allclose(orthopoly_eval(p, n, x), 2 * T(n)(x / 2), atol=1e-10)


@pytest.mark.parametrize("a", [1, Fraction(4, 27)])
def test_fourdiag_jacobi_closed_form(a):
    o = oracle_fourdiag(a)
    p = jacobi_params(bt.moments(o.symbol, 20, exact=True), 10)
    for k in range(1, 11):
        assert (p.a_sq[k - 1], p.b_exact[k - 1]) == o.jacobi(k)


def test_chebyshev_agrees_with_exact():
    ms = bt.moments(FIX["example5"], 40, exact=True)
    ex = jacobi_params(ms, 20)
    ch = jacobi_params(ms, 20, mode="chebyshev")
    k = ch.n_reliable
    assert k >= 10
    assert np.allclose(ch.a[:k], ex.a[:k], rtol=1e-10)
    assert np.allclose(ch.b[:k], ex.b[:k], rtol=1e-10, atol=1e-10)


def test_jacobi_input_checks():
    ms = bt.moments(FIX["tridiag-a1"], 10, exact=True)
    with pytest.raises(ValueError):
        jacobi_params(ms, 6)
    with pytest.raises(ValueError):
        jacobi_params(ms, 2, mode="bogus")
    with pytest.raises(MomentProblemError):
        jacobi_params(bt.moments(FIX["nonreal-cubic"], 20, exact=True), 5)


def test_nevai_limits_fourdiag():
    p = jacobi_params(bt.moments(FIX["fourdiag-a1"], 120, exact=True), 60)
    res = nevai_limits_check(p, 0.0, 27 / 4)
    assert res["N"] == 60
    assert res["residual_a"] < 2e-3 and res["residual_b"] < 2e-3


def test_tridiag_density_matches_arcsine(tri_density):
    o = oracle_tridiag(1)
    assert np.allclose(tri_density.values, o.density(tri_density.x), rtol=1e-9)
    assert tri_density.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_fourdiag_density_and_moments(four_density):
    o = oracle_fourdiag(1)
    assert np.allclose(four_density.values, o.density(four_density.x), rtol=1e-8)
    for m in range(6):
        assert four_density.integrate(lambda x: x ** m) == pytest.approx(float(o.moment(m)), rel=1e-10)


def test_orthogonality(four_density):
    p = jacobi_params(bt.moments(FIX["fourdiag-a1"], 16, exact=True), 8)
    for n in range(5):
        for m in range(5):
            res = orthogonality_check(p, four_density, n, m)
            assert res["error"] <= 1e-8 * max(1.0, res["expected"])


def test_limiting_measure_cdf_and_moments():
    c = bt.trace_polar(FIX["example5"], N=256)
    meas = LimitingMeasure(c)
    ms = bt.moments(FIX["example5"], 6, exact=True)
    got = meas.moments(6)
    assert np.allclose(got, [float(v) for v in ms.values], rtol=1e-10)
    lo, hi = meas.support
    assert meas.cdf(np.array([lo - 1]))[0] == 0
    assert meas.cdf(np.array([hi + 1]))[0] == pytest.approx(1.0, abs=1e-14)


@given(st.lists(st.floats(-2.6, 1.1), min_size=2, max_size=12))
@settings(max_examples=30, deadline=None)
def test_cdf_is_monotone(xs):
    xs = np.sort(np.array(xs))
    F = _EX5.cdf(xs)
    assert np.all(np.diff(F) >= -1e-12)
    assert np.all((F >= -1e-14) & (F <= 1 + 1e-12))


_EX5 = LimitingMeasure(bt.trace_polar(FIX["example5"], N=128))


def test_distribution_single_branch():
    c = bt.trace_polar(FIX["tridiag-a1"], N=64)
    o = oracle_tridiag(1)
    t = np.linspace(0.1, 3.0, 9)
    F = distribution_from_curve(FIX["tridiag-a1"], c, t)
    assert np.allclose(F, o.distribution(2 * np.cos(t)), atol=1e-12)
    with pytest.raises(ValueError):
        distribution_from_curve(FIX["example5"], bt.trace_polar(FIX["example5"], N=64), t)


@pytest.mark.parametrize("z", [3 + 0.5j, 0.3 + 0.01j, -1 - 2j, 1e-3j])
def test_weyl_m_tridiag(z):
    o = oracle_tridiag(1)
    ref = o.m_function(z)
    for method in ("auto", "residue"):
        assert abs(weyl_m(FIX["tridiag-a1"], z, method=method) - ref) < 1e-9 * max(1, abs(ref))


@pytest.mark.parametrize("z", [8 + 1j, 3 + 0.2j, 1 - 0.05j])
def test_weyl_m_fourdiag(z):
    ref = oracle_fourdiag(1).m_function(z)
    assert abs(weyl_m(FIX["fourdiag-a1"], z) - ref) < 1e-9 * max(1, abs(ref))


def test_weyl_m_on_limiting_set_raises():
    with pytest.raises(NumericalError):
        weyl_m(FIX["tridiag-a1"], 0.5)


@pytest.mark.parametrize("x", [-1.5, 0.3, 1.2])
def test_density_from_m(x):
    assert density_from_m(FIX["tridiag-a1"], x) == pytest.approx(oracle_tridiag(1).density(x), rel=1e-6)


def test_cauchy_transform_matches_m(four_density):
    z = 2 + 1j
    # m(z) = int dmu(x) / (x - z)
    assert abs(cauchy_transform(four_density, z) - weyl_m(FIX["fourdiag-a1"], z)) < 1e-9
    with pytest.raises(ValueError):
        cauchy_transform(four_density, 2.0)


def test_example3_five_diagonal_density():
    o = oracle_example3(2, 2)
    d = density_from_curve(o.symbol, bt.trace_polar(o.symbol, N=256), K=40)
    assert np.allclose(d.values, o.density(d.x), rtol=1e-8)


def test_kolmogorov_distance():
    x = np.linspace(0, 1, 101)[1:]
    assert kolmogorov_distance(x, lambda v: v) == pytest.approx(0.01)
    assert kolmogorov_distance(np.zeros(10), lambda v: np.full_like(v, 0.5)) == pytest.approx(0.5)
