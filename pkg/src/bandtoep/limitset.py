"""Point clouds of the limiting set via the root-modulus criterion.

``lambda`` lies in the limiting set exactly when ``|z_r| = |z_{r+1}|`` for the
roots of ``z^r (b(z) - lambda)`` sorted by modulus.  The scan evaluates the
defect ``|z_{r+1}| - |z_r|`` on a grid, seeds at one-dimensional local minima
along rows and columns and refines each seed by a golden-section search.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import det

from .polyroots import defect, modulus_split, roots, roots_by_modulus, symbol_poly
from .symbol import Symbol, critical_points, evaluate
from .toeplitz import norm_bound

__all__ = [
    "ExceptionalPoint",
    "LimitingSetCloud",
    "limiting_set_scan",
    "exceptional_points",
    "support_interval",
    "resolve_threads",
]

GOLDEN_ITERS = 50


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("BANDTOEP_THREADS", "0") or 0)
    return threads if threads > 0 else (os.cpu_count() or 1)


class ExceptionalPoint(NamedTuple):
    value: complex
    residual: float        # relative gap of the closest root pair


@dataclass
class LimitingSetCloud:
    """Points ``lambda`` with small defect, plus the scan metadata."""

    points: np.ndarray
    defects: np.ndarray
    region: tuple[float, float, float, float]
    resolution: int
    tol: float

    @property
    def grid_step(self) -> float:
        x0, x1, y0, y1 = self.region
        return max(x1 - x0, y1 - y0) / (self.resolution - 1)

    def real_fraction(self, tol: float = 1e-8) -> float:
        if self.points.size == 0:
            return 1.0
        scale = max(1.0, float(np.max(np.abs(self.points))))
        return float(np.mean(np.abs(self.points.imag) <= tol * scale))

    def max_imag(self) -> float:
        return float(np.max(np.abs(self.points.imag))) if self.points.size else 0.0

    def to_rows(self) -> list[tuple[float, float, float]]:
        return [(float(z.real), float(z.imag), float(d)) for z, d in zip(self.points, self.defects)]


def _defect_grid(b: Symbol, lam: np.ndarray, threads: int) -> np.ndarray:
    flat = lam.ravel()
    if threads <= 1 or flat.size < 20000:
        lo, hi = modulus_split(b, flat)
        return (hi - lo).reshape(lam.shape)
    parts = np.array_split(flat, threads)
    with ThreadPoolExecutor(threads) as ex:
        res = list(ex.map(lambda p: modulus_split(b, p), parts))
    return np.concatenate([hi - lo for lo, hi in res]).reshape(lam.shape)


def _golden(b: Symbol, center: np.ndarray, direction: complex, h: float,
            iters: int = GOLDEN_ITERS) -> tuple[np.ndarray, np.ndarray]:
    """Batched golden-section minimization of the defect on
    ``center + direction * [-h, h]``."""
    g = (math.sqrt(5) - 1) / 2
    a = np.full(center.shape, -h)
    c = np.full(center.shape, h)
    x1 = c - g * (c - a)
    x2 = a + g * (c - a)
    f1 = np.atleast_1d(defect(b, center + direction * x1))
    f2 = np.atleast_1d(defect(b, center + direction * x2))
    for _ in range(iters):
        left = f1 < f2
        c = np.where(left, x2, c)
        a = np.where(left, a, x1)
        nx1 = np.where(left, c - g * (c - a), x2)
        nx2 = np.where(left, x1, a + g * (c - a))
        fnew = np.atleast_1d(defect(b, center + direction * np.where(left, nx1, nx2)))
        f1, f2 = np.where(left, fnew, f2), np.where(left, f1, fnew)
        x1, x2 = nx1, nx2
    x = 0.5 * (a + c)
    pts = center + direction * x
    return pts, np.atleast_1d(defect(b, pts))


def _local_minima(D: np.ndarray, axis: int) -> np.ndarray:
    m = np.zeros(D.shape, bool)
    if axis == 0:
        m[1:-1, :] = (D[1:-1, :] <= D[:-2, :]) & (D[1:-1, :] <= D[2:, :])
    else:
        m[:, 1:-1] = (D[:, 1:-1] <= D[:, :-2]) & (D[:, 1:-1] <= D[:, 2:])
    return m


def limiting_set_scan(b: Symbol, region: tuple[float, float, float, float] | None = None,
                      resolution: int = 512, tol: float = 1e-6,
                      threads: int | None = None,
                      include_exceptional: bool = True) -> LimitingSetCloud:
    """Sample the limiting set on a square grid.

    Parameters
    ----------
    region : (x0, x1, y0, y1), optional
        Defaults to the square circumscribing the disc of radius ``R``.
    resolution : int
        Grid points per side.
    tol : float
        A refined point is kept when its defect is at most ``tol (1 + |z_r|)``.
    include_exceptional : bool
        Add exceptional points (multiple roots) that pass the same test; they
        are the end points of the arcs and are easy to miss on a grid.
    """
    if b.r < 1 or b.s < 1:
        raise ValueError("limiting set needs r, s >= 1")
    if resolution < 3:
        raise ValueError("resolution must be at least 3")
    R = norm_bound(b)
    if region is None:
        region = (-R, R, -R, R)
    x0, x1, y0, y1 = map(float, region)
    threads = resolve_threads(threads)
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    lam = xs[None, :] + 1j * ys[:, None]
    D = _defect_grid(b, lam, threads)

    pts, defs = [], []
    for axis, direction, h in ((0, 1j, hy), (1, 1.0, hx)):
        seeds = lam[_local_minima(D, axis)]
        if seeds.size == 0:
            continue
        p, d = _golden(b, seeds, direction, h)
        pts.append(p)
        defs.append(d)
    if include_exceptional:
        ex = np.array([e.value for e in exceptional_points(b)], dtype=complex)
        if ex.size:
            pts.append(ex)
            defs.append(np.atleast_1d(defect(b, ex)))
    if not pts:
        return LimitingSetCloud(np.zeros(0, complex), np.zeros(0), (x0, x1, y0, y1), resolution, tol)
    P = np.concatenate(pts)
    Dv = np.concatenate(defs)
    lo, _ = modulus_split(b, P)
    keep = (Dv <= tol * (1 + lo)) & (P.real >= x0 - hx) & (P.real <= x1 + hx) \
        & (P.imag >= y0 - hy) & (P.imag <= y1 + hy)
    P, Dv = P[keep], Dv[keep]
    order = np.lexsort((P.imag, P.real))
    P, Dv = P[order], Dv[order]
    if P.size:
        # drop duplicates from the two seed families
        dup = np.zeros(P.size, bool)
        dup[1:] = np.abs(np.diff(P)) <= 1e-9 * max(1.0, R)
        P, Dv = P[~dup], Dv[~dup]
    return LimitingSetCloud(P, Dv, (x0, x1, y0, y1), resolution, tol)


def _sylvester_disc(c: np.ndarray) -> complex:
    """Resultant of a polynomial and its derivative (ascending coefficients)."""
    p = c[::-1]
    dp = np.polynomial.polynomial.polyder(c)[::-1]
    m, n = len(p) - 1, len(dp) - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = p
    for i in range(m):
        S[n + i, i:i + n + 1] = dp
    return det(S)


def exceptional_points(b: Symbol) -> list[ExceptionalPoint]:
    """Values ``lambda`` where ``z^r (b(z) - lambda)`` has a multiple root.

    The discriminant in ``lambda`` has degree ``r + s``; it is sampled on a
    circle outside the norm disc (twice the minimum number of nodes, so
    that aliasing shows up in the top coefficients) and interpolated by FFT.
    """
    d = b.r + b.s
    R = norm_bound(b) + 1.0
    N = 2 * d + 2
    nodes = R * np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([_sylvester_disc(symbol_poly(b, lam)) for lam in nodes])
    coef = np.fft.fft(vals) / N / R ** np.arange(N)
    coef = coef[: d + 1]
    if np.max(np.abs(coef)) == 0:
        return []
    nz = np.nonzero(np.abs(coef) > 1e-13 * np.max(np.abs(coef)))[0]
    coef = coef[: nz[-1] + 1]
    if coef.size < 2:
        return []
    lams = roots(coef)
    # polish against the critical values b(c), which are the exact candidates
    cvals = np.array([evaluate(b, c.value) for c in critical_points(b)])
    out = []
    for lam in lams:
        if cvals.size:
            j = int(np.argmin(np.abs(cvals - lam)))
            if abs(cvals[j] - lam) <= 1e-6 * (1 + abs(lam)):
                lam = cvals[j]
        z = roots_by_modulus(b, lam).roots
        gaps = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(gaps, np.inf)
        res = float(np.min(gaps) / max(1.0, float(np.max(np.abs(z)))))
        out.append(ExceptionalPoint(complex(lam), res))
    out.sort(key=lambda e: (e.value.real, e.value.imag))
    # merge repeated roots of the discriminant
    merged: list[ExceptionalPoint] = []
    for e in out:
        if merged and abs(merged[-1].value - e.value) <= 1e-9 * (1 + abs(e.value)):
            continue
        merged.append(e)
    return merged


def support_interval(b: Symbol, curve=None) -> tuple[float, float]:
    """``[min alpha_i, max beta_i]`` over the branch intervals of the traced curve."""
    from .curve import trace_polar

    if curve is None:
        curve = trace_polar(b)
    lo = min(iv.alpha for iv in curve.intervals)
    hi = max(iv.beta for iv in curve.intervals)
    return float(lo), float(hi)
