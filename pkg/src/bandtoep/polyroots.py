"""Polynomial roots and the modulus ordering of ``z^r (b(z) - lambda)``.

Polynomials are passed as ascending coefficient arrays ``c_0 + c_1 z + ...``.
The solver is a batched Aberth-Ehrlich iteration started on a circle from the
Cauchy bound; batch members that stall fall back to companion-matrix
eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbol import Symbol

__all__ = [
    "RootError",
    "RootsByModulus",
    "roots",
    "roots_batch",
    "roots_by_modulus",
    "defect",
    "symbol_poly",
    "modulus_split",
]

MAX_ITER = 200


class RootError(ValueError):
    """Invalid polynomial input."""


def _check(c: np.ndarray) -> None:
    if c.shape[-1] < 2:
        raise RootError("polynomial degree must be at least 1")
    if not np.all(np.isfinite(c)):
        raise RootError("non-finite coefficients")
    if np.any(c[..., -1] == 0):
        raise RootError("leading coefficient is zero")


def _companion_roots(c: np.ndarray) -> np.ndarray:
    """Eigenvalues of the companion matrices of a batch of monic polynomials."""
    B, d1 = c.shape
    d = d1 - 1
    comp = np.zeros((B, d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -c[:, :-1] / c[:, -1:]
    return np.linalg.eigvals(comp)


def roots_batch(coeffs, tol: float = 1e-14, max_iter: int = MAX_ITER) -> np.ndarray:
    """Roots of many polynomials of equal degree.

    Parameters
    ----------
    coeffs : array_like, shape (B, d+1)
        Ascending coefficients; leading entries must be nonzero.
    tol : float
        Relative step size at which a root counts as converged.

    Returns
    -------
    ndarray, shape (B, d)
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    _check(c)
    B, d1 = c.shape
    d = d1 - 1
    if d == 1:
        return -c[:, :1] / c[:, 1:]
    c = c / c[:, -1:]
    dc = c[:, 1:] * np.arange(1, d1)

    # Cauchy bound and circle start, slightly rotated off the axes
    bound = 1.0 + np.max(np.abs(c[:, :-1]), axis=1)
    # geometric-mean radius is usually much closer than the bound
    rad = np.abs(c[:, 0]) ** (1.0 / d)
    rad = np.where((rad > 0) & (rad < bound), rad, 0.5 * bound)
    ang = 2 * np.pi * np.arange(d) / d + 0.4
    z = rad[:, None] * np.exp(1j * ang)[None, :]

    active = np.ones(B, bool)
    eye = np.eye(d, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        za = z[idx]
        ca, dca = c[idx], dc[idx]
        p = np.zeros_like(za) + ca[:, -1:]
        for k in range(d - 1, -1, -1):
            p = p * za + ca[:, k:k + 1]
        q = np.zeros_like(za) + dca[:, -1:]
        for k in range(d - 2, -1, -1):
            q = q * za + dca[:, k:k + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / q
            diff = za[:, :, None] - za[:, None, :]
            diff[:, eye] = 1.0
            inv = 1.0 / diff
            inv[:, eye] = 0.0
            s = inv.sum(axis=2)
            w = ratio / (1.0 - ratio * s)
        w = np.where(p == 0, 0.0, w)
        bad = ~np.isfinite(w)
        w[bad] = 0.0
        za = za - w
        z[idx] = za
        done = np.all(np.abs(w) <= tol * np.maximum(np.abs(za), 1e-300), axis=1)
        done &= ~np.any(bad, axis=1)
        active[idx[done]] = False

    if np.any(active):
        idx = np.nonzero(active)[0]
        z[idx] = _companion_roots(c[idx])
    return z


def roots(poly_coeffs, tol: float = 1e-10) -> np.ndarray:
    """All complex roots of one polynomial (ascending coefficients).

    Roots are accepted when ``|p(z)| <= tol * sum |c_k| |z|^k``; otherwise
    the companion-matrix eigenvalues are used instead.
    """
    c = np.asarray(poly_coeffs, dtype=complex)
    if c.ndim != 1:
        raise RootError("expected a 1-D coefficient array")
    if not np.all(np.isfinite(c)):
        raise RootError("non-finite coefficients")
    if not np.any(c != 0):
        raise RootError("zero polynomial")
    nz = np.nonzero(c)[0]
    c = c[: nz[-1] + 1]
    # factor out exact zero roots
    nzero = nz[0]
    c = c[nzero:]
    if c.size < 2:
        if nzero == 0:
            raise RootError("polynomial degree must be at least 1")
        return np.zeros(nzero, dtype=complex)
    z = roots_batch(c[None, :])[0]
    if not _residual_ok(c, z, tol):
        z = _companion_roots(c[None, :])[0]
    return np.concatenate([z, np.zeros(nzero, dtype=complex)])


def _residual_ok(c: np.ndarray, z: np.ndarray, tol: float) -> bool:
    val = np.polynomial.polynomial.polyval(z, c)
    scale = np.polynomial.polynomial.polyval(np.abs(z), np.abs(c))
    return bool(np.all(np.abs(val) <= tol * scale))


def symbol_poly(b: Symbol, lam) -> np.ndarray:
    """Ascending coefficients of ``z^r (b(z) - lambda)`` for scalar or array lambda."""
    base = b.band_array()
    lam = np.asarray(lam, dtype=complex)
    out = np.broadcast_to(base, lam.shape + base.shape).copy()
    out[..., b.r] -= lam
    return out


@dataclass(frozen=True)
class RootsByModulus:
    """Roots ``z_1..z_{r+s}`` of ``z^r (b(z) - lambda)`` sorted by modulus."""

    lam: complex
    roots: np.ndarray
    r: int
    condition: float

    @property
    def defect(self) -> float:
        m = np.abs(self.roots)
        return float(m[self.r] - m[self.r - 1])

    @property
    def inner(self) -> np.ndarray:
        return self.roots[: self.r]

    @property
    def outer(self) -> np.ndarray:
        return self.roots[self.r:]


def _require_banded(b: Symbol) -> None:
    if b.r < 1 or b.s < 1:
        raise RootError("symbol must have r, s >= 1")


def roots_by_modulus(b: Symbol, lam: complex) -> RootsByModulus:
    """Roots of ``z^r (b(z) - lambda)`` sorted by nondecreasing modulus.

    Ties keep solver order.  ``condition`` is the largest relative root
    condition number ``sum |c_k||z|^k / (|z||p'(z)|)``; it blows up near
    multiple roots.
    """
    _require_banded(b)
    c = symbol_poly(b, lam)
    z = roots(c)
    z = z[np.argsort(np.abs(z), kind="stable")]
    dp = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(c))
    scale = np.polynomial.polynomial.polyval(np.abs(z), np.abs(c))
    with np.errstate(divide="ignore"):
        cond = float(np.max(scale / (np.abs(z) * np.abs(dp))))
    return RootsByModulus(complex(lam), z, b.r, cond)


def modulus_split(b: Symbol, lam) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(|z_r|, |z_{r+1}|)`` over an array of lambda values."""
    _require_banded(b)
    lam = np.asarray(lam, dtype=complex)
    flat = lam.ravel()
    out_lo = np.empty(flat.shape)
    out_hi = np.empty(flat.shape)
    chunk = 65536
    for start in range(0, flat.size, chunk):
        sl = slice(start, start + chunk)
        z = roots_batch(symbol_poly(b, flat[sl]))
        m = np.sort(np.abs(z), axis=1)
        out_lo[sl] = m[:, b.r - 1]
        out_hi[sl] = m[:, b.r]
    return out_lo.reshape(lam.shape), out_hi.reshape(lam.shape)


def defect(b: Symbol, lam):
    """``|z_{r+1}(lambda)| - |z_r(lambda)|``; zero exactly on the limiting set."""
    lo, hi = modulus_split(b, lam)
    d = hi - lo
    return float(d) if np.ndim(d) == 0 else d
