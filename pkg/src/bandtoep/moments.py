"""Moments ``h_m``, Hankel determinants and positivity checks.

``h_m`` is the constant Laurent coefficient of ``b^m``.  For rational symbols
the convolution runs on integers after clearing denominators, and Hankel
determinants use fraction-free Bareiss elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .symbol import Symbol, evaluate

__all__ = [
    "MomentSequence",
    "HankelData",
    "PositivityReport",
    "MonteCarloEstimate",
    "moments",
    "hankel",
    "hankel_positivity",
    "hankel_det_mc",
    "bareiss_det",
    "leading_minors",
    "FLOAT_HANKEL_MAX",
]

FLOAT_HANKEL_MAX = 14


@dataclass
class MomentSequence:
    """``h_0..h_M``; Fractions in exact mode, complex floats otherwise."""

    symbol: Symbol
    values: list
    exact: bool

    @property
    def M(self) -> int:
        return len(self.values) - 1

    def as_float(self) -> np.ndarray:
        vals = np.array([complex(v) for v in self.values])
        return vals.real if np.all(vals.imag == 0) else vals

    def __getitem__(self, m):
        return self.values[m]


def moments(b: Symbol, M: int, exact: bool | None = None) -> MomentSequence:
    """Constant terms of ``b^0, ..., b^M``.

    Powers that can no longer return to zero within the remaining factors are
    dropped, so each step only convolves a window of width ``O(M (r+s))``.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    rat = b.rational() if exact in (None, True) else None
    if exact and rat is None:
        raise ValueError("exact moments need rational coefficients")
    r, s = b.r, b.s
    if rat is not None:
        den = 1
        for q in rat.values():
            den = den * q.denominator // math.gcd(den, q.denominator)
        base = [0] * (r + s + 1)
        for k, q in rat.items():
            base[k + r] = int(q * den)
        conv = _int_convolve
    else:
        den = 1
        base = list(b.band_array())
        conv = _float_convolve
    out = [Fraction(1) if rat is not None else 1.0 + 0j]
    power, lo = [1], 0
    for m in range(1, M + 1):
        power = conv(power, base)
        lo -= r
        rem = M - m
        # window of powers that can still reach 0
        keep_lo, keep_hi = -rem * s, rem * r
        a = max(0, keep_lo - lo)
        e = min(len(power), keep_hi - lo + 1)
        power = power[a:e]
        lo += a
        c = power[-lo] if 0 <= -lo < len(power) else 0
        out.append(Fraction(c, den ** m) if rat is not None else complex(c) / den ** m)
    return MomentSequence(b, out, rat is not None)


def _int_convolve(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return out


def _float_convolve(a: list, b: list) -> list:
    return list(np.convolve(np.asarray(a, complex), np.asarray(b, complex)))


# -- determinants -------------------------------------------------------------

def _to_int_rows(rows: list[list[Fraction]]) -> tuple[list[list[int]], Fraction]:
    scale = Fraction(1)
    out = []
    for row in rows:
        den = 1
        for q in row:
            den = den * q.denominator // math.gcd(den, q.denominator)
        out.append([int(q * den) for q in row])
        scale /= den
    return out, scale


def bareiss_det(rows: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free elimination with row pivoting."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    A, scale = _to_int_rows([[Fraction(x) for x in row] for row in rows])
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * Fraction(A[n - 1][n - 1]) * scale


def leading_minors(rows: list[list[Fraction]]) -> list[Fraction]:
    """All leading principal minors ``D_1..D_n`` from one Bareiss pass.

    Without pivoting the k-th pivot equals ``D_k`` (times the row scaling).
    The pass stops at the first zero minor; later entries are then computed
    separately.
    """
    n = len(rows)
    A, _ = _to_int_rows([[Fraction(x) for x in row] for row in rows])
    dens = [Fraction(1)]
    for row in rows:
        den = 1
        for q in row:
            q = Fraction(q)
            den = den * q.denominator // math.gcd(den, q.denominator)
        dens.append(dens[-1] / den)
    out: list[Fraction] = []
    prev = 1
    for k in range(n):
        akk = A[k][k]
        out.append(Fraction(akk) * dens[k + 1])
        if akk == 0:
            out.extend(bareiss_det([r[:j] for r in rows[:j]]) for j in range(k + 2, n + 1))
            return out
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return out


@dataclass
class HankelData:
    n: int
    H: list
    Htilde: list | None
    det_H: object
    det_Htilde: object
    mode: str

    @property
    def positive(self) -> bool:
        return bool(self.det_H > 0)


def _hankel_rows(vals, n: int, shift: int = 0) -> list[list]:
    return [[vals[i + j + shift] for j in range(n)] for i in range(n)]


def _htilde_rows(vals, n: int) -> list[list]:
    # H_{n+1} without row n+1 (last) and column n (second to last)
    full = _hankel_rows(vals, n + 1)
    return [row[: n - 1] + row[n:] for row in full[:n]]


def hankel(ms: MomentSequence, n: int) -> HankelData:
    """``H_n = (h_{i+j-2})`` and ``H~_n`` with their determinants.

    ``H~_n`` is ``H_{n+1}`` with its last row and its n-th column removed.
    Float mode refuses ``n > FLOAT_HANKEL_MAX``: the matrices are too badly
    conditioned for the digits to mean anything.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return HankelData(0, [], [], Fraction(1) if ms.exact else 1.0, Fraction(0) if ms.exact else 0.0,
                          "exact" if ms.exact else "float")
    if 2 * n - 2 > ms.M:
        raise ValueError(f"H_{n} needs moments up to h_{2 * n - 2}; have h_{ms.M}")
    vals = ms.values
    H = _hankel_rows(vals, n)
    Ht = _htilde_rows(vals, n) if 2 * n - 1 <= ms.M else None
    if ms.exact:
        dH = bareiss_det(H)
        dHt = bareiss_det(Ht) if Ht is not None else None
        return HankelData(n, H, Ht, dH, dHt, "exact")
    if n > FLOAT_HANKEL_MAX:
        raise ValueError(f"float Hankel determinants refused for n > {FLOAT_HANKEL_MAX}")
    Hf = np.array(H, dtype=complex)
    dH = np.linalg.det(Hf)
    dHt = np.linalg.det(np.array(Ht, dtype=complex)) if Ht is not None else None
    if np.all(Hf.imag == 0):
        dH = float(dH.real)
        dHt = float(dHt.real) if dHt is not None else None
    return HankelData(n, H, Ht, dH, dHt, "float")


@dataclass
class PositivityReport:
    status: str                 # PASS or FIRST_FAILURE
    N: int
    first_failure: int | None
    minors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": self.status, "N": self.N, "first_failure": self.first_failure,
                "minors": [str(m) if isinstance(m, Fraction) else float(m) for m in self.minors]}


def hankel_positivity(ms: MomentSequence, N: int) -> PositivityReport:
    """Leading-minor test of ``H_N``: exact Bareiss or a Cholesky attempt."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if 2 * N - 2 > ms.M:
        raise ValueError(f"positivity to N={N} needs h_{2 * N - 2}")
    H = _hankel_rows(ms.values, N)
    if ms.exact:
        minors = leading_minors(H)
        for i, d in enumerate(minors):
            if d <= 0:
                return PositivityReport("FIRST_FAILURE", N, i + 1, minors[: i + 1])
        return PositivityReport("PASS", N, None, minors)
    from scipy.linalg import lapack

    A = np.array(H, dtype=complex)
    if np.any(A.imag != 0):
        return PositivityReport("FIRST_FAILURE", N, 1, [])
    _, info = lapack.dpotrf(A.real, lower=1)
    if info > 0:
        return PositivityReport("FIRST_FAILURE", N, int(info), [])
    return PositivityReport("PASS", N, None, [])


# -- Monte Carlo -----------------------------------------------------------------

@dataclass
class MonteCarloEstimate:
    n: int
    estimate: float
    std_error: float
    samples: int
    seed: int
    imag_estimate: float = 0.0

    def to_dict(self) -> dict:
        return {"n": self.n, "det": self.estimate, "std_error": self.std_error,
                "samples": self.samples, "seed": self.seed, "mode": "monte-carlo",
                "imag": self.imag_estimate}


def _mc_block(b: Symbol, n: int, size: int, seed: int, block: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    t = rng.uniform(-np.pi, np.pi, size=(size, n))
    v = evaluate(b, np.exp(1j * t))
    logabs = np.zeros(size)
    phase = np.ones(size, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            d = (v[:, j] - v[:, i]) ** 2
            a = np.abs(d)
            logabs += np.log(np.where(a > 0, a, 1.0))
            phase *= np.where(a > 0, d / np.where(a > 0, a, 1.0), 0.0)
    return phase * np.exp(logabs - math.lgamma(n + 1))


def hankel_det_mc(b: Symbol, n: int, samples: int = 100_000, seed: int = 0,
                  block: int = 8192, threads: int | None = None) -> MonteCarloEstimate:
    """Monte Carlo value of ``det H_n`` from the Vandermonde integral.

    The integrand ``(1/n!) prod_{i<j} (b(e^{it_j}) - b(e^{it_i}))^2`` is
    averaged over uniform angles.  Block ``k`` draws from its own Philox
    stream keyed by ``(seed, k)``, so results do not depend on the number of
    worker threads.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if samples < 1000:
        raise ValueError("samples must be at least 1000")
    sizes = [min(block, samples - k) for k in range(0, samples, block)]
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda kb: _mc_block(b, n, kb[1], seed, kb[0]), enumerate(sizes)))
    else:
        parts = [_mc_block(b, n, sz, seed, k) for k, sz in enumerate(sizes)]
    vals = np.concatenate(parts)
    est = vals.mean()
    se = float(vals.real.std(ddof=1) / math.sqrt(vals.size)) if n > 1 else 0.0
    return MonteCarloEstimate(n, float(est.real), se, int(vals.size), seed, float(est.imag))
