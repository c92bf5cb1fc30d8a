"""The limiting eigenvalue measure and its Jacobi operator.

On a traced curve each monotone branch ``t -> b(gamma(t))`` over
``[phi_{i-1}, phi_i]`` pushes the uniform measure ``dt / pi`` forward to a
branch measure ``mu_i``; ``mu`` is their sum.  Densities, distribution
values and integrals against ``mu`` are all evaluated through that change of
variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .moments import MomentSequence, bareiss_det, leading_minors, _hankel_rows, _htilde_rows
from .polyroots import roots_by_modulus, symbol_poly
from .symbol import Symbol, evaluate
from .toeplitz import NumericalError

__all__ = [
    "MomentProblemError",
    "LimitingMeasure",
    "DensitySamples",
    "JacobiParameters",
    "density_from_curve",
    "distribution_from_curve",
    "integrate_density",
    "jacobi_params",
    "orthopoly_eval",
    "orthogonality_check",
    "weyl_m",
    "density_from_m",
    "cauchy_transform",
    "nevai_limits_check",
    "kolmogorov_distance",
]


class MomentProblemError(ValueError):
    """A Hankel determinant is not positive."""


# -- measure from a curve -----------------------------------------------------

@dataclass
class _Branch:
    t0: float
    t1: float
    lo: float
    hi: float
    orientation: int


class LimitingMeasure:
    """``mu = mu_1 + ... + mu_{l+1}`` built from a partitioned curve."""

    def __init__(self, curve):
        if not curve.intervals:
            raise ValueError("curve has no partition; run curve_critical_partition first")
        self.curve = curve
        p = curve.partition
        self.branches = [_Branch(p[i], p[i + 1], iv.alpha, iv.beta, iv.orientation)
                         for i, iv in enumerate(curve.intervals)]
        self.support = (min(b.lo for b in self.branches), max(b.hi for b in self.branches))
        # coarse tables for bracketing the inversion
        self._tables = []
        for br in self.branches:
            tt = np.linspace(br.t0, br.t1, 257)
            self._tables.append((tt, curve.value(tt)))

    def branch_t(self, x, i: int) -> np.ndarray:
        """Angles ``t`` on branch ``i`` with ``b(gamma(t)) = x`` (x inside the branch)."""
        br = self.branches[i]
        tt, vv = self._tables[i]
        x = np.atleast_1d(np.asarray(x, float))
        inc = vv[-1] > vv[0]
        vs = vv if inc else vv[::-1]
        ts = tt if inc else tt[::-1]
        j = np.clip(np.searchsorted(vs, x), 1, len(vs) - 1)
        a, c = ts[j - 1].copy(), ts[j].copy()
        fa = vs[j - 1] - x
        for _ in range(60):
            m = 0.5 * (a + c)
            fm = self.curve.value(m) - x
            same = np.sign(fm) == np.sign(fa)
            a = np.where(same, m, a)
            fa = np.where(same, fm, fa)
            c = np.where(same, c, m)
            if np.all(np.abs(c - a) <= 4e-16 * max(1.0, abs(br.t1))):
                break
        return 0.5 * (a + c)

    def branch_pdf(self, x, i: int) -> np.ndarray:
        br = self.branches[i]
        x = np.atleast_1d(np.asarray(x, float))
        out = np.zeros(x.shape)
        inside = (x > br.lo) & (x < br.hi)
        if np.any(inside):
            t = self.branch_t(x[inside], i)
            out[inside] = 1.0 / (math.pi * np.abs(self.curve.dvalue(t)))
        return out

    def pdf(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, float))
        return sum(self.branch_pdf(x, i) for i in range(len(self.branches)))

    def cdf(self, x) -> np.ndarray:
        """``F(x) = sum_i |t_i(x) - t_i(alpha_i)| / pi``."""
        x = np.atleast_1d(np.asarray(x, float))
        out = np.zeros(x.shape)
        for i, br in enumerate(self.branches):
            full = x >= br.hi
            out[full] += (br.t1 - br.t0) / math.pi
            inside = (x > br.lo) & (x < br.hi)
            if np.any(inside):
                t = self.branch_t(x[inside], i)
                t_lo = br.t0 if br.orientation > 0 else br.t1
                out[inside] += np.abs(t - t_lo) / math.pi
        return out

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-13,
                  max_nodes: int = 4096) -> float:
        """``int f dmu`` as ``(1/pi) int f(b(gamma(t))) dt`` over each branch."""
        total = 0.0
        for br in self.branches:
            n, prev = 32, None
            while True:
                x, w = np.polynomial.legendre.leggauss(n)
                t = br.t0 + (br.t1 - br.t0) * (x + 1) / 2
                val = float(np.sum(w * f(self.curve.value(t)))) * (br.t1 - br.t0) / (2 * math.pi)
                if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
                    break
                if n >= max_nodes:
                    raise NumericalError("branch quadrature did not settle")
                prev, n = val, 2 * n
            total += val
        return total

    def moments(self, M: int) -> np.ndarray:
        return np.array([self.integrate(lambda v, m=m: v ** m) for m in range(M + 1)])


@dataclass
class DensitySamples:
    """Sampled density on its support, with per-node branch labels.

    ``pdf`` and ``breakpoints`` (branch end points inside the support) let
    the quadrature helpers evaluate the density anywhere.
    """

    support: tuple[float, float]
    x: np.ndarray
    values: np.ndarray
    branch: np.ndarray
    pdf: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    breakpoints: list[float] = field(default_factory=list)
    measure: LimitingMeasure | None = field(default=None, repr=False)

    def integrate(self, f=None, **kw) -> float:
        f = f or (lambda x: np.ones_like(x))
        if self.measure is not None:
            return self.measure.integrate(f)
        if self.pdf is None:
            raise ValueError("no density function attached")
        return integrate_density(self.pdf, self.support, f, self.breakpoints, **kw)

    def total_mass(self) -> float:
        return self.integrate()

    def to_rows(self):
        return [(float(a), float(b), int(c)) for a, b, c in zip(self.x, self.values, self.branch)]


def integrate_density(pdf, support, f, breakpoints=(), tol: float = 1e-10,
                      power: int = 4, max_nodes: int = 2048) -> float:
    """``int f(x) pdf(x) dx`` with Gauss-Legendre on half-segments.

    Each half-segment is mapped by ``x = p + L u^power`` toward its singular
    end, which leaves a bounded integrand for end singularities up to
    ``|x - p|^{-3/4}``.  Nodes that round onto the end point itself are
    dropped; their weight is below double precision.
    """
    a, b = support
    pts = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (lo + hi)
        for end, other in ((lo, mid), (hi, mid)):
            L = other - end
            n, prev = 32, None
            while True:
                u, w = np.polynomial.legendre.leggauss(n)
                u = (u + 1) / 2
                x = end + L * u ** power
                jac = abs(L) * power * u ** (power - 1) / 2
                with np.errstate(divide="ignore", invalid="ignore"):
                    g = w * jac * pdf(x) * f(x)
                val = float(np.sum(np.where(np.isfinite(g), g, 0.0)))
                if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
                    break
                if n >= max_nodes:
                    if abs(val - prev) <= 1e3 * tol * max(1.0, abs(val)):
                        break
                    raise NumericalError("density quadrature did not settle")
                prev, n = val, 2 * n
            total += val
    return total


def _exceptional_reals(b: Symbol) -> list[float]:
    from .limitset import exceptional_points

    out = []
    for e in exceptional_points(b):
        if abs(e.value.imag) <= 1e-9 * (1 + abs(e.value)):
            out.append(e.value.real)
    return out


def density_from_curve(b: Symbol, curve, K: int = 200,
                       exclude: Sequence[float] | None = None) -> DensitySamples:
    """Density samples from a partitioned curve.

    ``K`` interior nodes per branch; nodes within ``1e-3 (beta - alpha)`` of
    a real exceptional point are dropped.  The values are the summed density
    of all branches covering the node.
    """
    meas = LimitingMeasure(curve)
    lo, hi = meas.support
    excl = list(_exceptional_reals(b) if exclude is None else exclude)
    radius = 1e-3 * (hi - lo)
    xs, lab = [], []
    for i, br in enumerate(meas.branches):
        x = br.lo + (br.hi - br.lo) * (np.arange(K) + 0.5) / K
        keep = np.ones(K, bool)
        for e in excl:
            keep &= np.abs(x - e) > radius
        xs.append(x[keep])
        lab.append(np.full(keep.sum(), i))
    x = np.concatenate(xs)
    lab = np.concatenate(lab)
    order = np.argsort(x, kind="stable")
    x, lab = x[order], lab[order]
    breaks = sorted({v for br in meas.branches for v in (br.lo, br.hi)})
    return DensitySamples((lo, hi), x, meas.pdf(x), lab, meas.pdf, breaks, meas)


def distribution_from_curve(b: Symbol, curve, t) -> np.ndarray:
    """``F(b(gamma(t)))`` for a single monotone branch: ``t/pi`` or ``1 - t/pi``."""
    if len(curve.intervals) != 1:
        raise ValueError("distribution_from_curve needs a single branch; integrate the density instead")
    t = np.asarray(t, float)
    if np.any((t < 0) | (t > math.pi)):
        raise ValueError("t must lie in [0, pi]")
    inc = curve.intervals[0].orientation > 0
    return t / math.pi if inc else 1.0 - t / math.pi


def kolmogorov_distance(samples, cdf: Callable) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    x = np.sort(np.real(np.asarray(samples)))
    n = x.size
    F = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(F - i / n)), np.max(np.abs(F - (i - 1) / n))))


# -- Jacobi parameters ----------------------------------------------------------

@dataclass
class JacobiParameters:
    """Off-diagonal ``a_1..a_N`` and diagonal ``b_1..b_N`` of ``J(b)``.

    ``a_sq`` keeps the squares exactly in exact mode.
    """

    a: np.ndarray
    b: np.ndarray
    mode: str
    a_sq: list | None = None
    b_exact: list | None = None
    n_reliable: int | None = None

    @property
    def N(self) -> int:
        return len(self.a)

    def to_rows(self):
        return [(n + 1, float(self.a[n]), float(self.b[n]), self.mode) for n in range(self.N)]


def jacobi_params(ms: MomentSequence, N: int, mode: str = "exact") -> JacobiParameters:
    """Recurrence coefficients from moments ``h_0..h_{2N}``.

    ``exact`` evaluates the Hankel determinant ratios in rational arithmetic.
    ``chebyshev`` runs the Chebyshev moment algorithm with 106-bit floats and
    reports ``n_reliable``, the number of leading indices on which a rerun at
    twice the precision agrees to 1e-10.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if ms.M < 2 * N:
        raise ValueError(f"need moments up to h_{2 * N}, have h_{ms.M}")
    if mode == "exact":
        return _jacobi_exact(ms, N)
    if mode == "chebyshev":
        if N > 40:
            raise ValueError("chebyshev mode supports N <= 40")
        return _jacobi_chebyshev(ms, N)
    raise ValueError(f"unknown mode {mode!r}")


def _jacobi_exact(ms: MomentSequence, N: int) -> JacobiParameters:
    if not ms.exact:
        raise ValueError("exact mode needs rational moments")
    vals = ms.values
    dets = [Fraction(1)] + leading_minors(_hankel_rows(vals, N + 1))   # det H_0..H_{N+1}
    for n, d in enumerate(dets):
        if d <= 0:
            raise MomentProblemError(
                f"det H_{n} = {d} <= 0 in exact arithmetic: the symbol is not in class R")
    dt = [Fraction(0)] + [bareiss_det(_htilde_rows(vals, n)) for n in range(1, N + 1)]
    a_sq = [dets[n - 1] * dets[n + 1] / dets[n] ** 2 for n in range(1, N + 1)]
    b_ex = [dt[n] / dets[n] - dt[n - 1] / dets[n - 1] for n in range(1, N + 1)]
    a = np.sqrt(np.array([float(q) for q in a_sq]))
    bb = np.array([float(q) for q in b_ex])
    return JacobiParameters(a, bb, "exact", a_sq, b_ex, N)


def _chebyshev_core(mom: list, N: int, prec: int):
    """Classical Chebyshev algorithm; returns alpha_0..alpha_{N-1}, beta_0..beta_N."""
    with mpmath.workprec(prec):
        mu = [mpmath.mpf(m.numerator) / m.denominator if isinstance(m, Fraction) else mpmath.mpf(m)
              for m in mom]
        L = 2 * N + 1
        prev2 = [mpmath.mpf(0)] * L
        prev = mu[:L]
        alpha = [prev[1] / prev[0]]
        beta = [prev[0]]
        for k in range(1, N + 1):
            cur = [mpmath.mpf(0)] * L
            for l in range(k, L - k):
                cur[l] = prev[l + 1] - alpha[k - 1] * prev[l] - beta[k - 1] * prev2[l]
            if cur[k] == 0:
                break
            beta.append(cur[k] / prev[k - 1])
            if k < N:
                alpha.append(cur[k + 1] / cur[k] - prev[k] / prev[k - 1])
            prev2, prev = prev, cur
        return alpha, beta


def _jacobi_chebyshev(ms: MomentSequence, N: int) -> JacobiParameters:
    mom = list(ms.values[: 2 * N + 1])
    if not ms.exact:
        mom = [complex(m).real for m in mom]
    alpha, beta = _chebyshev_core(mom, N, 106)
    alpha2, beta2 = _chebyshev_core(mom, N, 212)
    n_ok = min(len(alpha), len(beta) - 1)
    reliable = 0
    for n in range(1, n_ok + 1):
        if beta[n] <= 0:
            n_ok = n - 1
            break
        rel_b = abs(beta[n] - beta2[n]) / abs(beta2[n])
        rel_a = abs(alpha[n - 1] - alpha2[n - 1]) / max(1, abs(alpha2[n - 1]))
        if rel_b >= 1:
            # every digit of a_n^2 is gone
            n_ok = n - 1
            break
        if reliable == n - 1 and max(rel_a, rel_b) <= 1e-10:
            reliable = n
    if n_ok < 1:
        raise MomentProblemError("Chebyshev algorithm broke down at n = 1")
    a = np.sqrt(np.array([float(beta[n]) for n in range(1, n_ok + 1)]))
    bb = np.array([float(alpha[n - 1]) for n in range(1, n_ok + 1)])
    return JacobiParameters(a, bb, "chebyshev-extended", None, None, reliable)


def orthopoly_eval(params: JacobiParameters, n: int, x) -> np.ndarray:
    """Monic ``p_n(x)`` from ``p_{k+1} = (x - b_{k+1}) p_k - a_k^2 p_{k-1}``."""
    if n < 0 or n > params.N:
        raise ValueError(f"n must lie in [0, {params.N}]")
    x = np.asarray(x, float)
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        a2 = params.a[k - 1] ** 2 if k >= 1 else 0.0
        p_prev, p = p, (x - params.b[k]) * p - a2 * p_prev
    return p


def orthogonality_check(params: JacobiParameters, density: DensitySamples, n: int, m: int) -> dict:
    """``int p_n p_m dmu`` against ``delta_{nm} det H_{n+1} / det H_n``."""
    f = lambda x: orthopoly_eval(params, n, x) * orthopoly_eval(params, m, x)
    integral = density.integrate(f)
    expected = float(np.prod(params.a[:n] ** 2)) if n == m else 0.0
    return {"integral": integral, "expected": expected, "error": abs(integral - expected)}


def nevai_limits_check(params: JacobiParameters, alpha: float, beta: float) -> dict:
    N = params.N
    return {"N": N,
            "residual_a": abs(float(params.a[-1]) - (beta - alpha) / 4),
            "residual_b": abs(float(params.b[-1]) - (alpha + beta) / 2)}


# -- Weyl m-function ------------------------------------------------------------

def weyl_m(b: Symbol, lam: complex, tol: float = 1e-12, method: str = "auto",
           max_nodes: int = 2 ** 16) -> complex:
    """``(1/2 pi) int dtheta / (b(rho e^{i theta}) - lambda)``.

    ``rho`` is the geometric mean of ``|z_r|`` and ``|z_{r+1}|``.  When the
    trapezoid rule would need more than ``max_nodes`` nodes (lambda close to
    the limiting set) the integral is taken as the residue sum
    ``sum_{j <= r} z_j^{r-1} / p'(z_j)`` over the inner roots of
    ``p(z) = z^r (b(z) - lambda)``.
    """
    lam = complex(lam)
    rbm = roots_by_modulus(b, lam)
    z = rbm.roots
    r = b.r
    lo, hi = abs(z[r - 1]), abs(z[r])
    if hi - lo <= 1e-12 * max(1.0, hi):
        raise NumericalError("lambda lies on the limiting set: no separating circle")
    rho = math.sqrt(lo * hi)
    q = max(lo / rho, rho / hi)
    need = math.log(tol / 10) / math.log(q)
    if method == "residue" or (method == "auto" and need > max_nodes / 8):
        return _m_residue(b, lam, z[:r])
    N, prev = 32, None
    while True:
        th = 2 * math.pi * np.arange(N) / N
        val = complex(np.mean(1.0 / (evaluate(b, rho * np.exp(1j * th)) - lam)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        if N >= max_nodes:
            if method == "auto":
                return _m_residue(b, lam, z[:r])
            raise NumericalError("trapezoid rule for the m-function did not settle")
        prev, N = val, 2 * N


def _m_residue(b: Symbol, lam: complex, inner: np.ndarray) -> complex:
    c = symbol_poly(b, lam)
    dc = np.polynomial.polynomial.polyder(c)
    r = b.r
    return complex(np.sum(inner ** (r - 1) / np.polynomial.polynomial.polyval(inner, dc)))


def density_from_m(b: Symbol, x: float, eps0: float | None = None, levels: int = 8,
                   tol: float = 1e-6) -> float:
    """``(1/pi) lim Im m(x + i eps)`` by Neville extrapolation in ``eps``.

    ``eps_k = eps0 2^{-k}``.  ``eps0`` defaults to a quarter of the distance
    from ``x`` to the nearest exceptional point.
    """
    if eps0 is None:
        from .limitset import exceptional_points

        ex = [e.value for e in exceptional_points(b)]
        d = min((abs(x - e) for e in ex), default=1.0)
        eps0 = min(d / 4, 0.25)
    eps = eps0 * 2.0 ** -np.arange(levels)
    vals = [weyl_m(b, x + 1j * e).imag / math.pi for e in eps]
    # Neville table toward eps = 0
    T = list(vals)
    best, err = T[-1], float("inf")
    for k in range(1, levels):
        for i in range(levels - 1, k - 1, -1):
            T[i] = (eps[i - k] * T[i] - eps[i] * T[i - 1]) / (eps[i - k] - eps[i])
        err_k = abs(T[-1] - best)
        best = T[-1]
        err = min(err, err_k) if k > 1 else err_k
    if err > tol * (1 + abs(best)):
        raise NumericalError(f"extrapolation of Im m did not settle (spread {err:.3g})")
    return float(best)


def cauchy_transform(density: DensitySamples, z: complex) -> complex:
    """``int dmu(x) / (x - z)`` for ``z`` off the support."""
    z = complex(z)
    a, b = density.support
    d = abs(z.imag) if a <= z.real <= b else min(abs(z - a), abs(z - b))
    if d < 1e-6:
        raise ValueError("z is within 1e-6 of the support")
    re = density.integrate(lambda x: np.real(1.0 / (x - z)))
    im = density.integrate(lambda x: np.imag(1.0 / (x - z)))
    return complex(re, im)
