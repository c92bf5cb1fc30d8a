import numpy as np
import pytest

import bandtoep as bt
from bandtoep.limitset import resolve_threads
from bandtoep.oracles import fixtures, oracle_example3

FIX = fixtures()


def test_exceptional_points_tridiag():
    pts = sorted(p.value.real for p in bt.exceptional_points(FIX["tridiag-a1"]))
    assert np.allclose(pts, [-2, 2], atol=1e-10)


@pytest.mark.parametrize("r,s", [(1, 2), (2, 2), (4, 2)])
def test_support_interval_example3(r, s):
    lo, hi = bt.support_interval(oracle_example3(r, s).symbol)
    assert lo == pytest.approx(0, abs=1e-12)
    assert hi == pytest.approx((r + s) ** (r + s) / (r ** r * s ** s), rel=1e-12)


def test_scan_tridiag_on_segment():
    cloud = bt.limiting_set_scan(FIX["tridiag-a1"], resolution=128)
    assert np.max(np.abs(cloud.points.imag)) < 1e-10
    assert cloud.points.real.min() >= -2 - 1e-10 and cloud.points.real.max() <= 2 + 1e-10
    assert np.all(cloud.defects <= cloud.tol)


def test_scan_nonreal_symbol_leaves_real_axis():
    cloud = bt.limiting_set_scan(FIX["nonreal-cubic"], resolution=128)
    assert np.max(np.abs(cloud.points.imag)) > 0.1


def test_scan_thread_count_does_not_change_result():
    a = bt.limiting_set_scan(FIX["example5"], resolution=96, threads=1)
    b = bt.limiting_set_scan(FIX["example5"], resolution=96, threads=3)
    assert np.array_equal(a.points, b.points)


def test_resolve_threads_env(monkeypatch):
    monkeypatch.setenv("BANDTOEP_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
