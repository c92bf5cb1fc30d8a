"""Finite sections ``T_n(b)``: eigenvalues, determinants, trace means,
the curve form of ``<u, T_n v>``, and reality checks of the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import brentq

from .symbol import Symbol, evaluate

__all__ = [
    "NumericalError",
    "ToeplitzSection",
    "EigenReport",
    "RealityReport",
    "PolarCurve",
    "toeplitz_section",
    "eigenvalues",
    "best_scaling",
    "hessenberg_det_sequence",
    "trace_power_mean",
    "norm_bound",
    "bilinear_form_curve",
    "certify_real_spectrum",
    "reality_check",
]


class NumericalError(RuntimeError):
    """A numerical procedure failed to deliver a trustworthy answer."""


@dataclass(frozen=True)
class ToeplitzSection:
    n: int
    symbol: Symbol
    entries: np.ndarray


@dataclass(frozen=True)
class EigenReport:
    n: int
    eigenvalues: np.ndarray
    max_imag: float
    scaling: float = 1.0
    residual: float = 0.0


def norm_bound(b: Symbol) -> float:
    """``sum |a_k|``, a bound for every eigenvalue of every section."""
    return float(sum(abs(complex(c)) for c in b.coeffs.values()))


def _band_matrix(b: Symbol, n: int, rho: float = 1.0) -> np.ndarray:
    col = np.zeros(n, dtype=complex)
    row = np.zeros(n, dtype=complex)
    for k, c in b.coeffs.items():
        if 0 <= k < n:
            col[k] = c * rho ** k
        if -n < k <= 0:
            row[-k] = c * rho ** k
    m = sla.toeplitz(col, row)
    if b.real_coefficients:
        m = m.real.copy()
    return m


def toeplitz_section(b: Symbol, n: int) -> ToeplitzSection:
    """Dense ``n x n`` section with entry ``(i, j) = a_{i-j}``."""
    if n < 1:
        raise ValueError("n must be positive")
    return ToeplitzSection(n, b, _band_matrix(b, n))


def best_scaling(b: Symbol) -> float:
    """Radius minimizing ``sum |a_k|^2 rho^{2k}``.

    ``D^{-1} T_n(b) D`` with ``D = diag(rho^i)`` is the section of
    ``b(rho z)``; this choice balances the two triangles of the band.
    """
    ks = np.array([k for k in b.coeffs if k != 0], dtype=float)
    w = np.array([abs(complex(b.coeffs[int(k)])) ** 2 for k in ks])
    if not (np.any(ks > 0) and np.any(ks < 0)):
        return 1.0

    def grad(L):
        return float(np.sum(ks * w * np.exp(2 * ks * L)))

    lo, hi = -1.0, 1.0
    while grad(lo) > 0:
        lo *= 2
    while grad(hi) < 0:
        hi *= 2
    return float(math.exp(brentq(grad, lo, hi, xtol=1e-14)))


def _is_hermitian(b: Symbol) -> bool:
    return all(complex(b.coeffs.get(-k, 0)) == complex(c).conjugate() for k, c in b.coeffs.items())


def _sort_eigs(ev: np.ndarray) -> np.ndarray:
    return ev[np.lexsort((ev.imag, ev.real))]


def eigenvalues(section: ToeplitzSection | tuple[Symbol, int], scaling: float | str | None = "auto",
                check_residuals: bool = True, n_check: int = 8) -> EigenReport:
    """Eigenvalues of a section, sorted by (Re, Im).

    Non-normal sections are first transformed by the diagonal similarity
    ``diag(rho^i)`` (``scaling='auto'`` picks :func:`best_scaling`), which
    leaves the spectrum unchanged but greatly improves its conditioning.
    Hermitian sections use the symmetric solver.
    """
    if isinstance(section, tuple):
        section = toeplitz_section(*section)
    b, n = section.symbol, section.n
    if _is_hermitian(b):
        ev = sla.eigvalsh(section.entries).astype(complex)
        return EigenReport(n, _sort_eigs(ev), 0.0, 1.0, 0.0)
    rho = best_scaling(b) if scaling == "auto" else (1.0 if scaling is None else float(scaling))
    m = section.entries if rho == 1.0 else _band_matrix(b, n, rho)
    try:
        if check_residuals:
            ev, vec = sla.eig(m, check_finite=True)
        else:
            ev = sla.eigvals(m, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigenvalue iteration failed for n={n}: {exc}") from None
    res = 0.0
    if check_residuals:
        pick = np.unique(np.linspace(0, n - 1, min(n, n_check)).astype(int))
        nrm = max(np.linalg.norm(m, 1), 1e-300)
        for j in pick:
            v = vec[:, j]
            res = max(res, float(np.linalg.norm(m @ v - ev[j] * v) / (nrm * np.linalg.norm(v))))
        if res > 1e-8:
            raise NumericalError(f"eigenpair residual {res:.2e} exceeds 1e-8 for n={n}")
    ev = _sort_eigs(ev)
    return EigenReport(n, ev, float(np.max(np.abs(ev.imag))), rho, res)


def hessenberg_det_sequence(b: Symbol, N: int, exact: bool | None = None) -> list:
    """``D_n = det T_n(b)`` for ``n = 1..N`` when ``r = 1``.

    With superdiagonal ``c = a_{-1}`` the determinants satisfy
    ``D_n = sum_{k=1}^{n} (-c)^{k-1} a_{k-1} D_{n-k}``, ``D_0 = 1``;
    for ``c = 1`` this is the familiar alternating recurrence.
    """
    if b.r != 1:
        raise ValueError("the Hessenberg recurrence needs r = 1")
    if exact is None:
        exact = b.exact is not None
    if exact:
        if b.exact is None:
            raise ValueError("exact mode needs rational coefficients")
        a = lambda k: b.exact.get(k, Fraction(0))  # noqa: E731
        D = [Fraction(1)]
    else:
        a = lambda k: b.coeff(k)  # noqa: E731
        D = [1.0 + 0j]
    c = a(-1)
    for n in range(1, N + 1):
        acc = 0
        pw = 1
        for k in range(1, n + 1):
            acc += pw * a(k - 1) * D[n - k]
            pw *= -c
        D.append(acc)
    return D[1:]


def trace_power_mean(b: Symbol, n: int, m: int) -> complex:
    """``(1/n) Tr T_n(b)^m`` by repeated sparse banded products."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    offs, diags = [], []
    for k, c in b.coeffs.items():
        if abs(k) < n:
            offs.append(-k)
            diags.append(np.full(n - abs(k), complex(c)))
    dtype = float if b.real_coefficients else complex
    T = sp.diags([d.real if dtype is float else d for d in diags], offs, shape=(n, n),
                 format="csr", dtype=dtype)
    P = T
    for _ in range(m - 1):
        P = P @ T
    return complex(P.diagonal().sum()) / n


# -- curve quadrature ---------------------------------------------------------

class CurveLike(Protocol):
    def radius(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class PolarCurve:
    """Closed polar curve ``rho(t) e^{it}`` given by callables."""

    rho: Callable[[np.ndarray], np.ndarray]
    drho: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def circle(cls, radius: float = 1.0) -> "PolarCurve":
        return cls(lambda t: np.full(np.shape(t), float(radius)),
                   lambda t: np.zeros(np.shape(t)))

    def radius(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.rho(t), float), np.asarray(self.drho(t), float)


def bilinear_form_curve(a: Symbol, u, v, curve: CurveLike, tol: float = 1e-12,
                        max_nodes: int = 2 ** 16) -> complex:
    """``<u, T_n(a) v>`` as a contour integral over a curve around 0.

    Evaluates ``(1/2 pi i) \\oint a(g) f_v(g) conj(f_u(g*)) g'/g dt`` with
    ``g* = 1/conj(g)`` and ``f_u(z) = sum_k u_k z^k``.  Gauss-Legendre rules
    on ``[-pi, 0]`` and ``[0, pi]`` keep exponential convergence when the
    curve has corners at the real axis; the node count doubles until
    successive values agree.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("u and v must be vectors of equal length")
    r0, _ = curve.radius(np.array([-np.pi, np.pi]))
    if abs(r0[0] - r0[1]) > 1e-10 * max(1.0, abs(r0[0])):
        raise NumericalError("curve is not closed")

    def quad(N):
        x, wts = np.polynomial.legendre.leggauss(N)
        half = 0.5 * np.pi * (x + 1.0)
        t = np.concatenate([half - np.pi, half])
        wq = np.concatenate([wts, wts]) * 0.5 * np.pi
        rho, drho = curve.radius(t)
        g = rho * np.exp(1j * t)
        fv = np.polynomial.polynomial.polyval(g, v)
        # conj(f_u(g*)) = sum conj(u_k) g^{-k}
        fu = np.polynomial.polynomial.polyval(1.0 / g, np.conj(u))
        w = 1.0 - 1j * drho / rho
        return np.sum(wq * evaluate(a, g) * fv * fu * w) / (2 * np.pi)

    N = 32
    prev = quad(N)
    while N < max_nodes:
        N *= 2
        cur = quad(N)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return complex(cur)
        prev = cur
    raise NumericalError(f"quadrature did not settle with {max_nodes} nodes")


# -- reality of section spectra ------------------------------------------------

_HESS_CACHE: dict[tuple, list] = {}


def _hessenberg_charpolys(ints: dict[int, int], n: int) -> list | None:
    """``det(x - T_k)`` for ``k = 0..n`` when ``T`` is Hessenberg, else None.

    With one subdiagonal ``c = t_1`` the expansion along the last column
    gives ``p_k = (x - t_0) p_{k-1} - sum_d t_{-d} c^d p_{k-1-d}``; the
    transposed recurrence covers one superdiagonal.
    """
    import flint

    lower = max((k for k in ints if k > 0 and ints[k]), default=0)
    upper = max((-k for k in ints if k < 0 and ints[k]), default=0)
    if lower == 1:
        sub, far = ints[1], {d: ints.get(-d, 0) for d in range(1, upper + 1)}
    elif upper == 1:
        sub, far = ints[-1], {d: ints.get(d, 0) for d in range(1, lower + 1)}
    else:
        return None
    key = tuple(sorted(ints.items()))
    polys = _HESS_CACHE.get(key)
    if polys is None:
        if len(_HESS_CACHE) >= 8:
            _HESS_CACHE.pop(next(iter(_HESS_CACHE)))
        polys = _HESS_CACHE[key] = [flint.fmpz_poly([1])]
    lin = flint.fmpz_poly([-ints.get(0, 0), 1])
    while len(polys) <= n:
        k = len(polys)
        p = lin * polys[k - 1]
        for d, t in far.items():
            if t and k - 1 - d >= 0:
                p -= (t * sub ** d) * polys[k - 1 - d]
        polys.append(p)
    return polys


def _exact_charpoly(rat: dict[int, Fraction], n: int):
    import flint

    den = 1
    for q in rat.values():
        den = den * q.denominator // math.gcd(den, q.denominator)
    ints = {k: int(q * den) for k, q in rat.items()}
    # char poly of (den*T); real roots are scaled by den
    polys = _hessenberg_charpolys(ints, n)
    if polys is not None:
        return polys[n], den
    M = flint.fmpz_mat(n, n, [ints.get(i - j, 0) for i in range(n) for j in range(n)])
    return M.charpoly(), den


class _SignCache:
    """Signs of an exact integer polynomial at float abscissae, memoized."""

    def __init__(self, poly):
        import flint

        self._flint = flint
        self.poly = poly
        self.memo: dict[float, int] = {}
        bits = max((abs(int(c)).bit_length() for c in poly.coeffs()), default=1)
        # ball evaluation first; exact rationals only when the ball straddles 0
        self.prec = max(256, bits + 2 * poly.degree())
        saved = flint.ctx.prec
        try:
            flint.ctx.prec = self.prec
            self._ball = flint.arb_poly(poly)
        finally:
            flint.ctx.prec = saved

    def _exact(self, x: float) -> int:
        num, d = float(x).as_integer_ratio()
        val = self.poly(self._flint.fmpq(num, d))
        return 1 if val > 0 else (-1 if val < 0 else 0)

    def sign(self, x: float) -> int:
        return self.signs([x])[0]

    def signs(self, xs) -> list[int]:
        flint = self._flint
        todo = [x for x in dict.fromkeys(float(v) for v in xs) if x not in self.memo]
        if todo:
            saved = flint.ctx.prec
            try:
                flint.ctx.prec = self.prec
                for x in todo:
                    v = self._ball(flint.arb(x))
                    self.memo[x] = 1 if v > 0 else (-1 if v < 0 else None)
            finally:
                flint.ctx.prec = saved
            for x in todo:
                if self.memo[x] is None:
                    self.memo[x] = self._exact(x)
        return [self.memo[float(x)] for x in xs]

    def changes(self, xs) -> int:
        signs = [s for s in self.signs(xs) if s != 0]
        return sum(1 for p, q in zip(signs, signs[1:]) if p != q)


def _radius_range(b: Symbol) -> tuple[float, float]:
    from .polyroots import modulus_split

    R = norm_bound(b)
    lam = np.linspace(-R, R, 129)
    lo, hi = modulus_split(b, lam)
    vals = np.sqrt(lo * hi)
    vals = vals[np.isfinite(vals) & (vals > 0)]
    return float(vals.min()), float(vals.max())


def certify_real_spectrum(b: Symbol, n: int, radius_range: tuple[float, float] | None = None):
    """Certify that ``T_n(b)`` has ``n`` distinct real eigenvalues.

    The characteristic polynomial is formed exactly.  Candidate real
    eigenvalues come from double-precision solves under a ladder of
    diagonal scalings; the exact polynomial is then evaluated in rational
    arithmetic between consecutive candidates.  ``n`` sign changes prove
    ``n`` real roots.

    Returns ``(True, None)`` on success.  Otherwise the roots are isolated
    with certified complex balls and ``(False, witness)`` is returned, where
    ``witness`` is the root of largest imaginary part (``None`` when every
    root is real but some are repeated).
    """
    rat = b.rational()
    if rat is None:
        raise ValueError("certification needs real coefficients")
    poly, den = _exact_charpoly(rat, n)
    R = norm_bound(b)
    lo, hi = radius_range or _radius_range(b)
    lo = min(lo, best_scaling(b))
    hi = max(hi, best_scaling(b))
    cache = _SignCache(poly)
    tiny = 1e-11 * max(R * den, 1.0)
    cands = np.empty(0)
    done: set[float] = set()
    span = math.log(hi / lo)
    K = 2
    while True:
        for rho in np.exp(np.linspace(math.log(lo), math.log(hi), K)):
            key = round(float(rho), 12)
            if key in done:
                continue
            done.add(key)
            ev = sla.eigvals(_band_matrix(b, n, rho))
            cands = np.concatenate([cands, ev.real[np.abs(ev.imag) <= 1e-6 * max(R, 1.0)] * den])
        c = np.sort(cands)
        if c.size:
            c = c[np.concatenate([[True], np.diff(c) > tiny])]
        mids = (c[1:] + c[:-1]) / 2 if c.size > 1 else np.empty(0)
        pts = np.concatenate([[-(R + 1) * den], mids, [(R + 1) * den]])
        if cache.changes(pts) >= n:
            return True, None
        # ladder fine enough that every eigenvalue had a well-conditioned solve
        if span / (K - 1) < 4.0 / n or K > 4 * n:
            break
        K = 2 * K - 1
    # slow path: certified isolation of every root
    worst, wimag = None, 0.0
    for ball, _mult in poly.complex_roots():
        im = ball.imag
        if not im.contains(0):
            val = complex(float(ball.real.mid()), float(im.mid())) / den
            if abs(val.imag) > wimag:
                worst, wimag = val, abs(val.imag)
    return False, worst


@dataclass
class RealityReport:
    n_max: int
    tol: float
    norm_bound: float
    max_imag: dict[int, float] = field(default_factory=dict)
    method: dict[int, str] = field(default_factory=dict)
    witness: tuple[int, complex] | None = None

    @property
    def verdict(self) -> str:
        return "REAL" if self.witness is None else "NONREAL"

    @property
    def worst(self) -> float:
        return max(self.max_imag.values()) if self.max_imag else 0.0


def reality_check(a: Symbol, n_max: int, tol: float = 1e-10, sizes=None, certify: bool = True,
                  stop_at_first: bool = False) -> RealityReport:
    """Check that ``T_n(a)`` has real spectrum for every ``n <= n_max``.

    Each size is solved in double precision with diagonal scaling.  When the
    largest imaginary part exceeds ``tol * norm_bound(a)`` and the symbol has
    real coefficients, the answer is settled exactly (see
    :func:`certify_real_spectrum`); certified real spectra are recorded with
    ``max_imag = 0``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    R = norm_bound(a)
    rep = RealityReport(n_max, tol, R)
    thresh = tol * max(R, 1e-300)
    ns = range(1, n_max + 1) if sizes is None else sorted(set(int(k) for k in sizes if 1 <= k <= n_max))
    rr = None
    can_certify = certify and a.real_coefficients and a.r >= 1 and a.s >= 1
    for n in ns:
        if n == 1:
            ev = np.array([a.coeff(0)])
            mi, meth = abs(ev[0].imag), "direct"
        else:
            try:
                rpt = eigenvalues((a, n), check_residuals=False)
                ev, mi, meth = rpt.eigenvalues, rpt.max_imag, "float"
            except NumericalError:
                ev, mi, meth = None, np.inf, "float"
        if mi > thresh and can_certify and n > 1:
            if rr is None:
                rr = _radius_range(a)
            ok, wit = certify_real_spectrum(a, n, rr)
            meth = "certified"
            if ok or wit is None:
                mi = 0.0
                if not ok:
                    meth = "certified-multiple"
            else:
                mi = abs(wit.imag)
                ev = np.array([wit])
        rep.max_imag[n] = float(mi)
        rep.method[n] = meth
        if mi > thresh and rep.witness is None:
            lam = ev[np.argmax(np.abs(ev.imag))] if ev is not None else complex("nan")
            rep.witness = (n, complex(lam))
            if stop_at_first:
                break
    return rep
