import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bandtoep as bt
from bandtoep.moments import bareiss_det, leading_minors
from bandtoep.oracles import fixtures, oracle_example3, oracle_fourdiag, oracle_tridiag

FIX = fixtures()


def test_tridiag_moments_central_binomial():
    ms = bt.moments(FIX["tridiag-a1"], 20, exact=True)
    for m in range(21):
        assert ms[m] == (math.comb(m, m // 2) if m % 2 == 0 else 0)


@given(st.integers(1, 4), st.integers(1, 4), st.sampled_from([1, 2, Fraction(1, 3), -1]))
@settings(max_examples=30, deadline=None)
def test_example3_moments(r, s, a):
    o = oracle_example3(r, s, a)
    ms = bt.moments(o.symbol, 8, exact=True)
    assert all(ms[m] == o.moment(m) for m in range(9))


def test_float_moments_match_exact():
    b = FIX["example5"]
    ex = bt.moments(b, 12, exact=True)
    fl = bt.moments(b, 12, exact=False)
    assert np.allclose(fl.as_float(), [float(v) for v in ex.values], rtol=1e-12)


def test_bareiss_matches_fraction_determinant():
    rows = [[Fraction(2), Fraction(1, 3), Fraction(0)],
            [Fraction(1), Fraction(5), Fraction(-2, 7)],
            [Fraction(3), Fraction(0), Fraction(1)]]
    ref = (2 * (5 - 0) - Fraction(1, 3) * (1 + Fraction(6, 7)))
    assert bareiss_det(rows) == ref
    assert leading_minors(rows)[-1] == ref


@pytest.mark.parametrize("a", [1, 4])
def test_tridiag_hankel_closed_form(a):
    o = oracle_tridiag(a)
    ms = bt.moments(o.symbol, 30, exact=True)
    for n in range(1, 15):
        hd = bt.hankel(ms, n)
        assert hd.det_H == o.hankel_det(n)
        assert hd.det_Htilde == 0


@pytest.mark.parametrize("a", [1, Fraction(4, 27), 2])
def test_fourdiag_hankel_general_a(a):
    # the tilde determinant carries one extra factor a
    o = oracle_fourdiag(a)
    ms = bt.moments(o.symbol, 22, exact=True)
    for n in range(1, 11):
        hd = bt.hankel(ms, n)
        assert hd.det_H == o.hankel_det(n)
        assert hd.det_Htilde == o.hankel_tilde_det(n)


def test_float_hankel_refused_beyond_limit():
    ms = bt.moments(FIX["tridiag-a1"], 40, exact=False)
    assert bt.hankel(ms, 10).det_H == pytest.approx(2 ** 9, rel=1e-8)
    with pytest.raises(ValueError):
        bt.hankel(ms, 15)


def test_hankel_needs_enough_moments():
    with pytest.raises(ValueError):
        bt.hankel(bt.moments(FIX["tridiag-a1"], 4), 4)


def test_positivity_report():
    ok = bt.hankel_positivity(bt.moments(FIX["example5"], 40, exact=True), 15)
    assert ok.status == "PASS" and ok.first_failure is None
    bad = bt.hankel_positivity(bt.moments(FIX["nonreal-cubic"], 30, exact=True), 15)
    assert bad.status == "FIRST_FAILURE" and bad.first_failure == 2
    assert bad.to_dict()["minors"][0] == "1"


def test_mc_reproducible_and_thread_independent():
    b = FIX["fourdiag-a1"]
    one = bt.hankel_det_mc(b, 2, samples=20_000, seed=3, threads=1)
    four = bt.hankel_det_mc(b, 2, samples=20_000, seed=3, threads=4)
    assert one.estimate == four.estimate and one.std_error == four.std_error
    other = bt.hankel_det_mc(b, 2, samples=20_000, seed=4)
    assert other.estimate != one.estimate


def test_mc_agrees_with_exact_three():
    e = bt.hankel_det_mc(FIX["tridiag-a1"], 3, samples=100_000, seed=11)
    assert abs(e.estimate - 4) <= 4 * e.std_error
    assert abs(e.imag_estimate) < 1e-12


def test_mc_input_checks():
    with pytest.raises(ValueError):
        bt.hankel_det_mc(FIX["tridiag-a1"], 0)
    with pytest.raises(ValueError):
        bt.hankel_det_mc(FIX["tridiag-a1"], 2, samples=10)
