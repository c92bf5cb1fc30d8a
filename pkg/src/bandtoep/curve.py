"""Geometry of the real preimage ``b^{-1}(R)``.

Tracing works with the reduced function

    G(rho, t) = Im b(rho e^{it}) / sin t = sum_k a_k rho^k U_{k-1}(cos t),

where ``U`` are Chebyshev polynomials of the second kind (``U_{-k-1} = -U_{k-1}``).
``G`` removes the trivial zero set on the real axis, so a polar curve
``rho(t) e^{it}`` in ``b^{-1}(R)`` is a smooth branch of ``G = 0`` that starts
at ``t = 0`` where ``G(rho, 0) = rho b'(rho)`` vanishes, i.e. at a positive
critical point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.interpolate import CubicSpline

from .symbol import Symbol, critical_points, derivative, evaluate
from .toeplitz import RealityReport, norm_bound, reality_check

__all__ = [
    "CurveNotFound",
    "BranchInterval",
    "JordanCurveSamples",
    "NetPlot",
    "ClassVerdict",
    "compute_net",
    "default_window",
    "trace_polar",
    "curve_critical_partition",
    "reflect_curve",
    "is_class_R",
    "winding_number",
]

NEWTON_TOL = 1e-12
NEWTON_ITERS = 50
MIN_STEP = math.pi / 2 ** 20


class CurveNotFound(RuntimeError):
    """No polar Jordan curve could be traced.

    ``attempts`` lists ``(start_radius, failing_angle, reason)`` per start.
    """

    def __init__(self, message: str, attempts=()):
        super().__init__(message)
        self.attempts = list(attempts)


# -- the reduced function G ---------------------------------------------------

class _Reduced:
    """Evaluates ``G``, ``dG/drho`` and ``dG/dt`` for a real-coefficient symbol."""

    def __init__(self, b: Symbol):
        if not b.real_coefficients:
            raise ValueError("polar tracing needs real coefficients")
        self.b = b
        self.ks = [k for k in b.powers if k != 0]
        self.aks = [complex(b.coeffs[k]).real for k in self.ks]
        rat = b.rational()
        self.mp_aks = [mpmath.mpf(rat[k].numerator) / rat[k].denominator for k in self.ks]
        self.kmax = max(abs(k) for k in self.ks)

    def eval(self, rho, t, lib=np, aks=None):
        aks = self.aks if aks is None else aks
        x, st = lib.cos(t), lib.sin(t)
        U = [0 * x, 0 * x + 1]          # U_{-1}, U_0
        dU = [0 * x, 0 * x]
        for _ in range(self.kmax - 1):
            U.append(2 * x * U[-1] - U[-2])
            dU.append(2 * U[-2] + 2 * x * dU[-1] - dU[-2])
        G = Gr = Gt = 0 * x
        for k, a in zip(self.ks, aks):
            j = abs(k)
            sgn = 1 if k > 0 else -1
            S, dS = sgn * U[j], -sgn * st * dU[j]
            pw = rho ** k
            G = G + a * pw * S
            Gr = Gr + k * a * pw / rho * S
            Gt = Gt + a * pw * dS
        return G, Gr, Gt

    def scale(self, rho):
        return sum(abs(a) * rho ** k for k, a in zip(self.ks, self.aks)) + abs(self.b.coeff(0))

    def newton(self, rho, t):
        """Scalar Newton in rho at fixed t; returns (rho, converged)."""
        sc = self.scale(rho)
        for _ in range(NEWTON_ITERS):
            G, Gr, _ = self.eval(rho, t, lib=math)
            if Gr == 0 or not math.isfinite(G):
                return rho, False
            d = G / Gr
            rho -= d
            if not (rho > 0 and math.isfinite(rho)):
                return rho, False
            if abs(d) <= 1e-13 * rho or abs(G) <= 1e-14 * sc:
                return rho, True
        G, _, _ = self.eval(rho, t, lib=math)
        return rho, abs(G) <= NEWTON_TOL * sc

    def polish_mp(self, rho, t, iters=8):
        """Newton in extended precision near ill-conditioned points."""
        with mpmath.workprec(200):
            r, tt = mpmath.mpf(rho), mpmath.mpf(t)
            for _ in range(iters):
                G, Gr, _ = self.eval(r, tt, lib=mpmath, aks=self.mp_aks)
                if Gr == 0:
                    break
                d = G / Gr
                r -= d
                if r <= 0:
                    return math.nan
                if abs(d) < mpmath.mpf(2) ** -120 * abs(r):
                    break
            return float(r)

    def ill_conditioned(self, rho, t) -> bool:
        _, Gr, _ = self.eval(rho, t, lib=math)
        return abs(Gr) * rho < 1e-3 * self.scale(rho)


# -- curve samples ------------------------------------------------------------

class BranchInterval(NamedTuple):
    alpha: float
    beta: float
    orientation: int        # +1 when b(gamma(t)) increases on the branch


@dataclass
class JordanCurveSamples:
    """Samples of a polar curve ``rho(t) e^{it}`` on which ``b`` is real.

    Angles run over ``[-pi, pi]``; ``partition`` holds the critical angles
    ``0 = phi_0 < ... < phi_{l+1} = pi`` and ``intervals`` the images
    ``b(gamma([phi_{i-1}, phi_i]))``.
    """

    symbol: Symbol
    t: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    values: np.ndarray
    residual: float
    partition: list[float] = field(default_factory=lambda: [0.0, math.pi])
    intervals: list[BranchInterval] = field(default_factory=list)
    reflected: bool = False

    @property
    def gamma(self) -> np.ndarray:
        return self.rho * np.exp(1j * self.t)

    @property
    def n_branches(self) -> int:
        return len(self.partition) - 1

    # continuous evaluation -------------------------------------------------
    def _reduced(self) -> _Reduced:
        red = getattr(self, "_red", None)
        if red is None:
            red = _Reduced(self.symbol)
            object.__setattr__(self, "_red", red)
        return red

    def _spline(self):
        sp = getattr(self, "_sp", None)
        if sp is None:
            upper = self.t >= 0
            sp = CubicSpline(self.t[upper], self.base_rho[upper])
            object.__setattr__(self, "_sp", sp)
        return sp

    @property
    def base_rho(self) -> np.ndarray:
        return 1.0 / self.rho if self.reflected else self.rho

    def radius(self, t):
        """``(rho(t), rho'(t))`` at arbitrary angles, refined by Newton."""
        t = np.asarray(t, dtype=float)
        shape = t.shape
        tt = np.abs(np.mod(t.ravel() + np.pi, 2 * np.pi) - np.pi)
        red = self._reduced()
        guess = self._spline()(tt)
        rho = guess.copy()
        for _ in range(8):
            G, Gr, _ = red.eval(rho, tt)
            step = np.where(Gr != 0, G / np.where(Gr == 0, 1, Gr), 0.0)
            rho = rho - step
            if np.all(np.abs(step) <= 1e-14 * rho):
                break
        G, Gr, Gt = red.eval(rho, tt)
        sc = red.scale(rho)
        _, Gr0, _ = red.eval(guess, tt)
        bad = (np.abs(Gr) * rho < 1e-3 * sc) | (np.abs(Gr0) * guess < 1e-3 * red.scale(guess))
        bad |= ~np.isfinite(rho) | (np.abs(rho - guess) > 1e-4 * guess)
        for i in np.nonzero(bad)[0]:
            p = red.polish_mp(guess[i], tt[i], iters=40)
            rho[i] = p if math.isfinite(p) else guess[i]
        # end points are snapped critical moduli; Newton is slow on multiple roots
        rho = np.where(tt == 0.0, self.base_rho[self.t.size // 2], rho)
        rho = np.where(tt == math.pi, self.base_rho[-1], rho)
        drho = _drho(red, rho, tt, self._spline()(tt, 1))
        drho = drho * np.sign(np.mod(t.ravel() + np.pi, 2 * np.pi) - np.pi + 0.0)
        drho = np.where(np.abs(tt) < 1e-300, 0.0, drho)
        if self.reflected:
            drho = -drho / rho ** 2
            rho = 1.0 / rho
        return rho.reshape(shape), drho.reshape(shape)

    def points(self, t) -> np.ndarray:
        rho, _ = self.radius(t)
        return rho * np.exp(1j * np.asarray(t, float))

    def value(self, t) -> np.ndarray:
        """``b(gamma(t))`` (real part)."""
        return np.real(evaluate(self.symbol, self.points(t)))

    def dvalue(self, t) -> np.ndarray:
        """``d/dt b(gamma(t)) = Re[b'(gamma) (rho' + i rho) e^{it}]``."""
        t = np.asarray(t, float)
        rho, drho = self.radius(t)
        g = rho * np.exp(1j * t)
        db = evaluate(derivative(self.symbol), g)
        return np.real(db * (drho + 1j * rho) * np.exp(1j * t))

    def resample(self, N: int) -> "JordanCurveSamples":
        t = -np.pi + 2 * np.pi * np.arange(N + 1) / N
        rho, drho = self.radius(t)
        vals = np.real(evaluate(self.symbol, rho * np.exp(1j * t)))
        return replace(self, t=t, rho=rho, drho=drho, values=vals)


def _drho(red: _Reduced, rho, t, fallback):
    """``rho'(t)`` by implicit differentiation.

    Where both partial derivatives vanish (the curve passes through a
    critical point, possibly with a corner at ``t = pi``) the one-sided
    spline derivative ``fallback`` is used instead.
    """
    G, Gr, Gt = red.eval(rho, t)
    sc = red.scale(rho)
    ok = np.abs(Gr) * rho > 1e-6 * sc
    return np.where(ok, -Gt / np.where(ok, Gr, 1.0), fallback)


# -- tracing ------------------------------------------------------------------

def _real_crit(b: Symbol, sign: int) -> list[tuple[float, int]]:
    out = []
    for c in critical_points(b):
        z = c.value
        if abs(z.imag) <= 1e-9 * max(1.0, abs(z)) and sign * z.real > 0:
            out.append((abs(z.real), c.multiplicity))
    return sorted(out)


class _Fail(Exception):
    def __init__(self, t, reason):
        super().__init__(reason)
        self.t, self.reason = t, reason


def _step(red: _Reduced, rho: float, t: float, tn: float) -> tuple[float, float, bool]:
    """Tangent predictor and Newton corrector from ``t`` to ``tn``.

    Near a multiple critical point ``G`` vanishes to high order and double
    precision only sees rounding noise, so ill-conditioned steps run in
    200-bit arithmetic.  Returns ``(predicted, corrected, converged)``.
    """
    if not red.ill_conditioned(rho, t):
        _, Gr, Gt = red.eval(rho, t, lib=math)
        slope = -Gt / Gr if Gr != 0 else 0.0
        rp = rho + slope * (tn - t)
        if rp <= 0:
            return rp, rp, False
        rn, conv = red.newton(rp, tn)
        return rp, rn, conv
    with mpmath.workprec(200):
        r, tt, tnn = mpmath.mpf(rho), mpmath.mpf(t), mpmath.mpf(tn)
        _, Gr, Gt = red.eval(r, tt, lib=mpmath, aks=red.mp_aks)
        slope = -Gt / Gr if Gr != 0 else mpmath.mpf(0)
        rp = r + slope * (tnn - tt)
        if rp <= 0:
            return float(rp), float(rp), False
        rn = rp
        # residual at the rounding floor also counts as converged
        floor = mpmath.mpf(2) ** -180 * red.scale(float(rp))
        for _ in range(NEWTON_ITERS):
            G, Gr, _ = red.eval(rn, tnn, lib=mpmath, aks=red.mp_aks)
            if Gr == 0:
                return float(rp), float(rn), abs(G) <= floor
            d = G / Gr
            rn -= d
            if rn <= 0:
                return float(rp), float(rn), False
            if abs(d) < mpmath.mpf(2) ** -110 * rn or abs(G) <= floor:
                return float(rp), float(rn), True
        return float(rp), float(rn), False


def _advance(red: _Reduced, rho: float, t: float, target: float, h: float, hmax: float):
    """Adaptive continuation from ``t`` to ``target``; returns ``(rho, h)``."""
    while t < target - 1e-15:
        rem = target - t
        hs = min(h, rem)
        while True:
            if hs < MIN_STEP and hs != rem:
                raise _Fail(t, "step size underflow")
            tn = target if hs == rem else t + hs
            rp, rn, conv = _step(red, rho, t, tn)
            # reject corrections that jump to a neighbouring branch of the net
            if conv and rn > 0 and abs(rn - rp) <= 0.02 * rho + 0.5 * abs(rp - rho):
                break
            hs /= 2
            h = hs
        rho, t = rn, tn
        if hs >= h:
            h = min(1.5 * h, hmax)
    return rho, h


def _trace_upper(red: _Reduced, rho0: float, M: int, neg_crit: list[float]):
    """Continue the branch through (rho0, 0) up to t = pi on M equal steps.

    Returns the radii at ``t_j = pi j / M`` or raises ``_Fail``.  The end
    point must be a negative critical point (``G(rho, pi)`` is a multiple
    of ``b'(-rho)``); it is located by marching to ``pi - h/64``,
    extrapolating along the tangent and snapping to the nearest one.
    """
    # coarse output grids still march with moderate internal steps
    hmax = min(math.pi / M, math.pi / 64)
    rho, h = rho0, hmax
    out = [rho0]
    for j in range(1, M):
        rho, h = _advance(red, rho, math.pi * (j - 1) / M, math.pi * j / M, h, hmax)
        out.append(rho)
    delta = math.pi / M / 64
    t_end = math.pi - delta
    r_end, _ = _advance(red, rho, math.pi * (M - 1) / M, t_end, h, hmax)
    with mpmath.workprec(200):
        _, Gr, Gt = red.eval(mpmath.mpf(r_end), mpmath.mpf(t_end), lib=mpmath, aks=red.mp_aks)
        slope = float(-Gt / Gr) if Gr != 0 else 0.0
    est = r_end + slope * delta
    near = [c for c in neg_crit if abs(est - c) <= 1e-2 * c]
    if not near:
        raise _Fail(math.pi, "end point is not a negative critical point")
    out.append(min(near, key=lambda c: abs(est - c)))
    return np.array(out)


def trace_polar(b: Symbol, N: int = 1024, partition: bool = True) -> JordanCurveSamples:
    """Trace a polar Jordan curve ``rho(t) e^{it}`` inside ``b^{-1}(R)``.

    Every positive real critical point is tried as ``rho(0)``, in increasing
    order.  The branch of ``G = 0`` through it is continued in ``t`` with a
    tangent predictor and Newton corrector; a sweep succeeds when it lands on
    a negative real critical point at ``t = pi``.  The lower half follows by
    conjugation symmetry.

    Parameters
    ----------
    b : Symbol
        Real coefficients, ``r, s >= 1``.
    N : int
        Even number of angle steps on ``[-pi, pi]``.

    Raises
    ------
    CurveNotFound
        When no start yields a full sweep.
    """
    if not b.real_coefficients:
        raise ValueError("trace_polar needs real coefficients")
    if b.r < 1 or b.s < 1:
        raise ValueError("trace_polar needs r, s >= 1")
    if N < 8 or N % 2:
        raise ValueError("N must be an even integer >= 8")
    red = _Reduced(b)
    starts = _real_crit(b, +1)
    neg = [c for c, _ in _real_crit(b, -1)]
    attempts = []
    M = N // 2
    for rho0, _mult in starts:
        try:
            upper = _trace_upper(red, rho0, M, neg)
        except _Fail as exc:
            attempts.append((rho0, exc.t, exc.reason))
            continue
        t_up = math.pi * np.arange(M + 1) / M
        t = np.concatenate([-t_up[::-1], t_up[1:]])
        rho = np.concatenate([upper[::-1], upper[1:]])
        drho_up = _drho(red, upper, t_up, CubicSpline(t_up, upper)(t_up, 1))
        drho = np.concatenate([-drho_up[::-1], drho_up[1:]])
        g = rho * np.exp(1j * t)
        vals = evaluate(b, g)
        R = norm_bound(b)
        residual = float(np.max(np.abs(vals.imag)) / R)
        curve = JordanCurveSamples(b, t, rho, drho, vals.real, residual)
        if partition:
            curve = curve_critical_partition(b, curve)
        return curve
    raise CurveNotFound("no polar Jordan curve found", attempts)


def curve_critical_partition(b: Symbol, curve: JordanCurveSamples,
                             tol: float = 1e-12) -> JordanCurveSamples:
    """Locate the angles in ``(0, pi)`` where ``b(gamma(t))`` turns.

    Candidates are critical points of ``b`` lying on the curve; each angle is
    refined by bisection on ``d/dt b(gamma(t))``.
    """
    phis = []
    for c in critical_points(b):
        z = c.value
        if z.imag <= 1e-10 * abs(z):
            continue
        th = math.atan2(z.imag, z.real)
        rho, _ = curve.radius(np.array([th]))
        if abs(rho[0] - abs(z)) > 1e-7 * abs(z):
            continue
        phi = _bisect_turn(curve, th, tol)
        if phi is not None:
            phis.append(phi)
    phis = sorted(set(phis))
    part = [0.0] + phis + [math.pi]
    vals = curve.value(np.array(part))
    intervals = []
    for i in range(len(part) - 1):
        lo, hi = float(vals[i]), float(vals[i + 1])
        intervals.append(BranchInterval(min(lo, hi), max(lo, hi), 1 if hi > lo else -1))
    return replace(curve, partition=part, intervals=intervals)


def _bisect_turn(curve: JordanCurveSamples, th: float, tol: float):
    for delta in (1e-6, 1e-5, 1e-4, 1e-3):
        lo, hi = max(th - delta, 1e-12), min(th + delta, math.pi - 1e-12)
        flo, fhi = curve.dvalue(np.array([lo, hi]))
        if flo * fhi < 0:
            break
    else:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = curve.dvalue(np.array([mid]))[0]
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reflect_curve(curve: JordanCurveSamples) -> JordanCurveSamples:
    """Samples of ``gamma* = 1 / conj(gamma)``: radii inverted, angles kept."""
    return replace(curve, rho=1.0 / curve.rho, drho=-curve.drho / curve.rho ** 2,
                   values=np.real(evaluate(curve.symbol, np.exp(1j * curve.t) / curve.rho)),
                   reflected=not curve.reflected)


def winding_number(points: np.ndarray) -> int:
    """Winding number of a closed polygon about the origin."""
    ang = np.unwrap(np.angle(np.asarray(points)))
    return int(round((ang[-1] - ang[0]) / (2 * math.pi)))


# -- class membership ------------------------------------------------------

@dataclass
class ClassVerdict:
    verdict: str                       # YES, NO or UNKNOWN
    curve: JordanCurveSamples | None = None
    witness: tuple[int, complex] | None = None
    reality: RealityReport | None = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "note": self.note}
        if self.curve is not None:
            out["certificate"] = {
                "samples": int(self.curve.t.size),
                "max_imag_residual": self.curve.residual,
                "rho0": float(self.curve.rho[self.curve.t.size // 2]),
                "rho_pi": float(self.curve.rho[-1]),
                "partition": [float(p) for p in self.curve.partition],
                "intervals": [list(map(float, iv[:2])) + [iv[2]] for iv in self.curve.intervals],
            }
        if self.witness is not None:
            n, lam = self.witness
            out["witness"] = {"n": n, "re": lam.real, "im": lam.imag}
        return out


def is_class_R(b: Symbol, n_probe: int = 40, N: int = 512) -> ClassVerdict:
    """Decide whether ``b`` has asymptotically real spectrum.

    YES comes with a traced polar curve, NO with a non-real eigenvalue of
    some ``T_n(b)``, ``n <= n_probe``; anything else is UNKNOWN.
    """
    note = ""
    if b.real_coefficients and b.r >= 1 and b.s >= 1:
        try:
            return ClassVerdict("YES", curve=trace_polar(b, N))
        except CurveNotFound as exc:
            note = "; ".join(f"start {r0:.6g}: {why} at t={t:.6g}" for r0, t, why in exc.attempts) \
                or "no positive real critical point"
    else:
        note = "complex coefficients: no polar trace attempted"
    rep = reality_check(b, n_probe, stop_at_first=True)
    if rep.witness is not None:
        return ClassVerdict("NO", witness=rep.witness, reality=rep, note=note)
    return ClassVerdict("UNKNOWN", reality=rep, note=note)


# -- net ----------------------------------------------------------------------

@dataclass
class NetPlot:
    """Zero set of ``Im b`` on a log-polar window."""

    window: tuple[float, float]          # (ln rho_min, ln rho_max)
    polylines: list[np.ndarray]
    grid: tuple[int, int]
    residual: float
    sign: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in line] for line in self.polylines]

    def separates_zero_infinity(self) -> bool:
        """True when no cell path avoiding the net joins the inner and outer
        window boundaries, i.e. the net blocks every path from 0 to infinity."""
        from scipy import ndimage

        out = False
        for s in (1, -1):
            lab, nlab = ndimage.label(self.sign == s)
            if nlab == 0:
                continue
            # glue the angular seam
            parent = list(range(nlab + 1))

            def find(a):
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                return a

            for a, c in zip(lab[:, 0], lab[:, -1]):
                if a and c:
                    parent[find(a)] = find(c)
            inner = {find(a) for a in lab[0] if a}
            outer = {find(a) for a in lab[-1] if a}
            if inner & outer:
                return False
            out = True
        return out


def default_window(b: Symbol) -> tuple[float, float]:
    """Log-radius range from the roots of ``z^r b(z)``, padded by a factor 2."""
    from .polyroots import roots

    z = roots(b.band_array())
    m = np.abs(z[z != 0])
    if m.size == 0:
        return (-2.0, 2.0)
    return (math.log(m.min() / 2), math.log(m.max() * 2))


def compute_net(b: Symbol, window: tuple[float, float] | None = None,
                grid: tuple[int, int] = (1024, 1024)) -> NetPlot:
    """Extract ``{z : Im b(z) = 0}`` by marching squares on a log-polar grid.

    Contour vertices lie on grid edges; each is refined by bisection along its
    edge.  The angular grid is offset by half a cell so the real axis is
    picked up as a sign change.
    """
    import contourpy

    n_r, n_t = grid
    if n_r < 2 or n_t < 2:
        raise ValueError("grid must be at least 2 x 2")
    lw = window or default_window(b)
    if not lw[1] > lw[0]:
        raise ValueError("degenerate window")
    L = np.linspace(lw[0], lw[1], n_r)
    dt = 2 * math.pi / n_t
    th = -math.pi + (np.arange(n_t + 1) + 0.5) * dt      # last column wraps around
    LL, TT = np.meshgrid(L, th, indexing="ij")
    F = np.imag(evaluate(b, np.exp(LL + 1j * TT)))
    sign = np.where(F >= 0, 1, -1).astype(np.int8)[:, :n_t]
    gen = contourpy.contour_generator(th, L, F, name="serial")
    lines = gen.lines(0.0)

    def f(Lv, Tv):
        return np.imag(evaluate(b, np.exp(Lv + 1j * Tv)))

    scale = norm_bound(b)
    polylines, worst = [], 0.0
    for line in lines:
        tv, lv = line[:, 0].copy(), line[:, 1].copy()
        jt = (tv - th[0]) / dt
        il = (lv - L[0]) / (L[1] - L[0]) if n_r > 1 else np.zeros_like(lv)
        on_row = np.abs(il - np.round(il)) < 1e-9
        # along rows the angle varies, along columns the log-radius varies
        lo_t = th[0] + np.floor(jt) * dt
        lo_l = L[0] + np.floor(il) * (L[1] - L[0])
        a = np.where(on_row, lo_t, lo_l)
        c = np.where(on_row, lo_t + dt, lo_l + (L[1] - L[0]))
        a = np.where(on_row, np.minimum(a, tv), np.minimum(a, lv))
        c = np.where(on_row, np.maximum(c, tv), np.maximum(c, lv))
        fa = np.where(on_row, f(lv, a), f(a, tv))
        for _ in range(60):
            m = 0.5 * (a + c)
            fm = np.where(on_row, f(lv, m), f(m, tv))
            left = np.sign(fm) == np.sign(fa)
            a = np.where(left, m, a)
            fa = np.where(left, fm, fa)
            c = np.where(left, c, m)
        m = 0.5 * (a + c)
        tv = np.where(on_row, m, tv)
        lv = np.where(on_row, lv, m)
        z = np.exp(lv + 1j * tv)
        worst = max(worst, float(np.max(np.abs(np.imag(evaluate(b, z))))) / scale)
        polylines.append(z)
    return NetPlot(lw, polylines, (n_r, n_t), worst, sign)
