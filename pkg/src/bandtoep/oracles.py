"""Closed-form reference data for the explicitly solvable symbols, and the
named fixture registry.

Everything here is written out independently of the numerical pipeline so
that tests can compare the two.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .symbol import Symbol, make_symbol

__all__ = [
    "OracleBundle",
    "oracle_tridiag",
    "oracle_fourdiag",
    "oracle_example3",
    "fourdiag_density_unit",
    "fixtures",
    "get_fixture",
    "FIXTURE_NOTES",
]


@dataclass
class OracleBundle:
    """Closed forms attached to one symbol; ``None`` where none is known."""

    name: str
    symbol: Symbol
    support: tuple[float, float]
    moment: Callable[[int], Fraction]
    density: Callable[[np.ndarray], np.ndarray] | None = None
    hankel_det: Callable[[int], Fraction] | None = None
    hankel_tilde_det: Callable[[int], Fraction] | None = None
    jacobi: Callable[[int], tuple[Fraction, Fraction]] | None = None   # (a_k^2, b_k)
    curve_rho: Callable[[np.ndarray], np.ndarray] | None = None
    curve_values: Callable[[np.ndarray], np.ndarray] | None = None
    m_function: Callable[[complex], complex] | None = None
    distribution: Callable[[np.ndarray], np.ndarray] | None = None
    integrate: Callable[[Callable], float] | None = None       # int f dmu


def _gauss(g: Callable, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Gauss-Legendre on a smooth integrand, doubling the order until stable."""
    n, prev = 32, None
    while True:
        x, w = np.polynomial.legendre.leggauss(n)
        val = float(np.sum(w * g(lo + (hi - lo) * (x + 1) / 2))) * (hi - lo) / 2
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if n >= 2048:
            raise ArithmeticError("oracle quadrature did not settle")
        prev, n = val, 2 * n


def _arcsine_integral(center: float, half: float) -> Callable:
    # x = center + half sin(theta) turns the arcsine law into d(theta)/pi
    return lambda f: _gauss(lambda th: f(center + half * np.sin(th)), -math.pi / 2, math.pi / 2) / math.pi


def _fourdiag_unit_integral(f: Callable) -> float:
    c = math.sqrt(3) / (4 * math.pi)
    # 1 - s is formed as x / (1 + s) to keep its relative accuracy near x = 0
    num = lambda s, x: np.cbrt(1 + s) + np.cbrt(x / (1 + s))
    sq = lambda v: np.sqrt(1 - v ** 3)
    # [0, 1/2]: x = v^3 absorbs x^{-2/3}
    left = lambda v: 3 * c * num(sq(v), v ** 3) / sq(v) * f(v ** 3)
    # [1/2, 1]: x = 1 - s^2 absorbs (1 - x)^{-1/2}
    right = lambda s: 2 * c * num(s, 1 - s * s) / (1 - s * s) ** (2 / 3) * f(1 - s * s)
    return _gauss(left, 0.0, 0.5 ** (1 / 3)) + _gauss(right, 0.0, math.sqrt(0.5))


def _fivediag_unit_integral(f: Callable) -> float:
    # [0, 8]: x = u^4 absorbs x^{-3/4}; [8, 16]: x = 16 - v^2 absorbs (16 - x)^{-1/2}
    left = lambda u: 4 * np.sqrt(4 + u * u) / (2 * math.pi * np.sqrt(16 - u ** 4)) * f(u ** 4)
    right = lambda v: 2 * np.sqrt(4 + np.sqrt(16 - v * v)) / (2 * math.pi * (16 - v * v) ** 0.75) * f(16 - v * v)
    return _gauss(left, 0.0, 8 ** 0.25) + _gauss(right, 0.0, math.sqrt(8))


def _frac(a) -> Fraction:
    return a if isinstance(a, Fraction) else Fraction(a)


# -- tridiagonal: 1/z + a z ---------------------------------------------------

def oracle_tridiag(a=1) -> OracleBundle:
    """Arcsine law on ``[-2 sqrt(a), 2 sqrt(a)]``.

    ``a_1^2 = 2a`` and ``a_k^2 = a`` follow from ``det H_n = 2^{n-1} a^{n(n-1)/2}``.
    """
    a = _frac(a)
    if a <= 0:
        raise ValueError("the tridiagonal oracle needs a > 0")
    sa = math.sqrt(a)

    def moment(m):
        return Fraction(0) if m % 2 else math.comb(m, m // 2) * a ** (m // 2)

    def density(x):
        x = np.asarray(x, float)
        return 1.0 / (math.pi * np.sqrt(4 * float(a) - x ** 2))

    def jac(k):
        return (2 * a if k == 1 else a, Fraction(0))

    def m_function(z):
        z = complex(z)
        return -1.0 / (cmath.sqrt(z - 2 * sa) * cmath.sqrt(z + 2 * sa))

    return OracleBundle(
        name=f"tridiag-a{a}",
        symbol=make_symbol([(-1, 1), (1, a)]),
        support=(-2 * sa, 2 * sa),
        moment=moment,
        density=density,
        hankel_det=lambda n: 2 ** (n - 1) * a ** (n * (n - 1) // 2) if n >= 1 else Fraction(1),
        hankel_tilde_det=lambda n: Fraction(0),
        jacobi=jac,
        curve_rho=lambda t: np.full(np.shape(t), 1 / sa),
        curve_values=lambda t: 2 * sa * np.cos(t),
        m_function=m_function,
        distribution=lambda x: 0.5 + np.arcsin(np.asarray(x, float) / (2 * sa)) / math.pi,
        integrate=_arcsine_integral(0.0, 2 * sa),
    )


# -- four-diagonal: (1 + a z)^3 / z ----------------------------------------------

def fourdiag_density_unit(x):
    """Density for ``a = 4/27`` on ``(0, 1)``."""
    x = np.asarray(x, float)
    s = np.sqrt(1 - x)
    return math.sqrt(3) / (4 * math.pi) * (np.cbrt(1 + s) + np.cbrt(x / (1 + s))) / (x ** (2 / 3) * s)


def _fourdiag_m_unit(z: complex) -> complex:
    z = complex(z)
    sz = cmath.sqrt(z)
    w = cmath.sqrt(1 - 1 / z)
    return -((1j / sz + w) ** (1 / 3) + (-1j / sz + w) ** (1 / 3)) / (2 * cmath.sqrt(z) * cmath.sqrt(z - 1))


def oracle_fourdiag(a=1) -> OracleBundle:
    a = _frac(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    scale = Fraction(27, 4) * a          # support [0, 27a/4] up to orientation

    def moment(m):
        return math.comb(3 * m, m) * a ** m

    def hdet(n):
        if n == 0:
            return Fraction(1)
        p = Fraction(1)
        for i in range(n):
            p *= Fraction((3 * i + 1) * math.factorial(6 * i) * math.factorial(2 * i),
                          math.factorial(4 * i) * math.factorial(4 * i + 1))
        return 3 ** (n - 1) * p * a ** (n * (n - 1))

    def htdet(n):
        # removing column n shifts the scaling exponent by one, hence the factor a
        if n == 0:
            return Fraction(0)
        return Fraction(27 * n * n - 8 * n - 1, 2 * (4 * n - 1)) * hdet(n) * a

    def jac(k):
        if k == 1:
            return 6 * a * a, 3 * a
        a2 = Fraction(9 * (6 * k - 5) * (6 * k - 1) * (3 * k - 1) * (3 * k + 1),
                      4 * (4 * k - 3) * (4 * k - 1) ** 2 * (4 * k + 1)) * a * a
        bk = Fraction(3 * (36 * k * k - 54 * k + 13), 2 * (4 * k - 5) * (4 * k - 1)) * a
        return a2, bk

    fs = float(scale)

    def density(x):
        y = np.asarray(x, float) / fs
        return fourdiag_density_unit(y) / abs(fs)

    return OracleBundle(
        name=f"fourdiag-a{a}",
        symbol=make_symbol([(-1, 1), (0, 3 * a), (1, 3 * a * a), (2, a ** 3)]),
        support=(min(0.0, fs), max(0.0, fs)),
        moment=moment,
        density=density,
        hankel_det=hdet,
        hankel_tilde_det=htdet,
        jacobi=jac,
        m_function=lambda z: _fourdiag_m_unit(complex(z) / fs) / fs,
        integrate=lambda f: _fourdiag_unit_integral(lambda y: f(fs * y)),
    )


# -- z^{-r} (1 + a z)^{r+s} -------------------------------------------------------

def oracle_example3(r: int, s: int, a=1) -> OracleBundle:
    """Moments, curve and (for three cases) density of ``z^{-r} (1 + a z)^{r+s}``.

    Scaling ``z -> a z`` multiplies the symbol by ``a^r``, so the curve is
    the ``a = 1`` curve divided by ``a`` and values scale by ``a^r``.
    """
    if r < 1 or s < 1:
        raise ValueError("r and s must be positive")
    a = _frac(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    d = r + s
    w = r / d
    top = d ** d / (r ** r * s ** s)
    ar = float(a) ** r
    sym = make_symbol([(k - r, math.comb(d, k) * a ** k) for k in range(d + 1)])

    def moment(m):
        return math.comb(d * m, r * m) * a ** (r * m)

    def rho(t):
        t = np.asarray(t, float)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.sin(w * t) / np.sin((1 - w) * t)
        return np.where(t == 0, r / s, out) / float(a)

    def values(t):
        t = np.asarray(t, float)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.sin(t) ** d / (np.sin(w * t) ** r * np.sin((1 - w) * t) ** s)
        return ar * np.where(t == 0, top, out)

    density = integrate = None
    if (r, s) == (1, 1):
        af = float(a)
        density = lambda x: 1.0 / (math.pi * np.sqrt(4 * af * af - (np.asarray(x, float) - 2 * af) ** 2))
        integrate = _arcsine_integral(2 * af, 2 * abs(af))
    elif (r, s) == (1, 2):
        fd = oracle_fourdiag(a)
        density, integrate = fd.density, fd.integrate
    elif (r, s) == (2, 2):
        def density(x):
            y = np.asarray(x, float) / ar
            return np.sqrt(4 + np.sqrt(y)) / (2 * math.pi * y ** 0.75 * np.sqrt(16 - y)) / abs(ar)

        integrate = lambda f: _fivediag_unit_integral(lambda y: f(ar * y))

    lo, hi = sorted((0.0, ar * top))
    curve_ok = a > 0
    return OracleBundle(
        name=f"example3-r{r}-s{s}-a{a}",
        symbol=sym,
        support=(lo, hi),
        moment=moment,
        density=density,
        curve_rho=rho if curve_ok else None,
        curve_values=values if curve_ok else None,
        distribution=None,
        integrate=integrate,
    )


# -- registry --------------------------------------------------------------------

def _break(alpha) -> Symbol:
    return make_symbol([(-3, 1), (-2, -1), (-1, 7), (1, 9), (2, alpha), (3, 2), (4, -1)])


FIXTURE_NOTES = {
    "tridiag-a1": "1/z + z, arcsine law on [-2, 2]",
    "tridiag-a4": "1/z + 4z, arcsine law on [-4, 4]",
    "fourdiag-a1": "(1+z)^3/z, support [0, 27/4]",
    "fourdiag-a4/27": "(1+4z/27)^3/z, support [0, 1]",
    "example3-r1-s2": "(1+z)^3/z",
    "example3-r1-s5": "(1+z)^6/z",
    "example3-r4-s2": "(1+z)^6/z^4",
    "example3-r2-s2": "(1+z)^4/z^2, five-diagonal",
    "example4": "1/z^3 - 1/z^2 + 7/z + 9z - 2z^2 + 2z^3 - z^4",
    "example5": "1/z^3 + 1/z^2 + 1/z + z + z^2 + z^3, three branch measures",
    "break-a-2": "breaking family, alpha = -2 (same as example4)",
    "break-a0": "breaking family, alpha = 0",
    "break-a0.77": "breaking family, alpha = 0.77",
    "break-a1": "breaking family, alpha = 1",
    "break-a2": "breaking family, alpha = 2",
    "separ": "1/z + sum_{k=1}^{10} k z^k",
    "nonreal-cubic": "1/z + z^2, not in class R",
}


def fixtures() -> dict[str, Symbol]:
    """All named symbols, in a stable order."""
    out = {
        "tridiag-a1": oracle_tridiag(1).symbol,
        "tridiag-a4": oracle_tridiag(4).symbol,
        "fourdiag-a1": oracle_fourdiag(1).symbol,
        "fourdiag-a4/27": oracle_fourdiag(Fraction(4, 27)).symbol,
        "example3-r1-s2": oracle_example3(1, 2).symbol,
        "example3-r1-s5": oracle_example3(1, 5).symbol,
        "example3-r4-s2": oracle_example3(4, 2).symbol,
        "example3-r2-s2": oracle_example3(2, 2).symbol,
        "example4": _break(-2),
        "example5": make_symbol([(k, 1) for k in (-3, -2, -1, 1, 2, 3)]),
    }
    for tag, alpha in (("-2", -2), ("0", 0), ("0.77", "0.77"), ("1", 1), ("2", 2)):
        out[f"break-a{tag}"] = _break(alpha)
    out["separ"] = make_symbol([(-1, 1)] + [(k, k) for k in range(1, 11)])
    out["nonreal-cubic"] = make_symbol([(-1, 1), (2, 1)])
    return out


def get_fixture(name: str) -> Symbol:
    fx = fixtures()
    if name not in fx:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fx)}")
    return fx[name]
