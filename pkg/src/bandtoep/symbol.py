"""Laurent-polynomial symbols and their calculus.

A symbol ``b(z) = sum_{k=-r}^{s} a_k z^k`` generates the banded Toeplitz
matrices ``T_n(b)`` with entries ``a_{i-j}``.  Coefficients are stored as
complex floats; when the input is rational an exact copy is kept as well so
that determinant and moment computations can run in exact arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Symbol",
    "TruncatedSymbol",
    "CriticalPoint",
    "SymbolError",
    "make_symbol",
    "evaluate",
    "derivative",
    "critical_points",
    "compose_entire",
    "symbol_from_json",
    "symbol_to_json",
]


class SymbolError(ValueError):
    """Invalid symbol construction or evaluation."""


def _as_fraction(c) -> Fraction | None:
    if isinstance(c, bool):
        return Fraction(int(c))
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        try:
            return Fraction(c)
        except ValueError:
            return None
    return None


@dataclass(frozen=True, eq=False)
class Symbol:
    """Laurent polynomial with coefficients ``a_k`` for ``k`` in ``[-r, s]``.

    Parameters
    ----------
    coeffs : mapping of int to complex
        Nonzero coefficients only.
    exact : mapping of int to Fraction, optional
        Exact rational copy of ``coeffs`` (same keys) when available.
    """

    coeffs: Mapping[int, complex]
    exact: Mapping[int, Fraction] | None = None

    def __post_init__(self):
        if self.exact is not None and set(self.exact) != set(self.coeffs):
            raise SymbolError("exact and float coefficient maps disagree")

    @property
    def powers(self) -> list[int]:
        return sorted(self.coeffs)

    @property
    def r(self) -> int:
        p = self.powers
        return max(0, -p[0]) if p else 0

    @property
    def s(self) -> int:
        p = self.powers
        return max(0, p[-1]) if p else 0

    @property
    def real_coefficients(self) -> bool:
        return all(complex(c).imag == 0.0 for c in self.coeffs.values())

    @property
    def is_two_sided(self) -> bool:
        p = self.powers
        return bool(p) and p[0] < 0 < p[-1]

    def coeff(self, k: int) -> complex:
        return complex(self.coeffs.get(k, 0.0))

    def rational(self) -> dict[int, Fraction] | None:
        """Exact rational coefficients, or None for non-real symbols.

        Float coefficients are binary rationals, so a real float symbol is
        converted without loss.
        """
        if self.exact is not None:
            return dict(self.exact)
        if not self.real_coefficients:
            return None
        return {k: Fraction(complex(c).real) for k, c in self.coeffs.items()}

    def band_array(self) -> np.ndarray:
        """Coefficients ``a_{-r}, ..., a_s`` as a dense complex array."""
        r, s = self.r, self.s
        out = np.zeros(r + s + 1, dtype=complex)
        for k, c in self.coeffs.items():
            out[k + r] = c
        return out

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {self.coeffs[k]}" for k in self.powers)
        return f"{type(self).__name__}({{{terms}}})"


@dataclass(frozen=True, eq=False)
class TruncatedSymbol(Symbol):
    """Truncated Laurent series of a general symbol.

    ``tail_bound`` bounds the absolute coefficient mass that was dropped,
    measured on the annulus used for truncation.
    """

    tail_bound: float = 0.0
    bounds: tuple[int, int] = (0, 0)
    annulus: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self):
        super().__post_init__()
        if self.tail_bound < 0:
            raise SymbolError("tail_bound must be non-negative")
        R, S = self.bounds
        if any(k < -R or k > S for k in self.coeffs):
            raise SymbolError("coefficient outside the truncation band")


class CriticalPoint(NamedTuple):
    value: complex
    multiplicity: int


def make_symbol(entries: Iterable[tuple[int, object]] | Mapping[int, object],
                two_sided: bool = True) -> Symbol:
    """Build a normalized symbol from ``(power, coefficient)`` pairs.

    Coefficients may be ints, Fractions, rational strings, floats or
    complex numbers.  Zero coefficients are dropped.  With ``two_sided``
    the result must have at least one negative and one positive power.
    """
    if isinstance(entries, Mapping):
        entries = list(entries.items())
    entries = list(entries)
    if not entries:
        raise SymbolError("empty coefficient list")
    seen: set[int] = set()
    floats: dict[int, complex] = {}
    exact: dict[int, Fraction] = {}
    all_exact = True
    for k, c in entries:
        if int(k) != k:
            raise SymbolError(f"non-integer power {k!r}")
        k = int(k)
        if k in seen:
            raise SymbolError(f"duplicate power {k}")
        seen.add(k)
        fr = _as_fraction(c)
        if fr is None:
            all_exact = False
            cz = complex(c)
            if not np.isfinite(cz.real) or not np.isfinite(cz.imag):
                raise SymbolError(f"non-finite coefficient at power {k}")
        else:
            cz = complex(float(fr))
            exact[k] = fr
        if cz != 0 or (fr is not None and fr != 0):
            floats[k] = cz
    keep = sorted(floats)
    if all_exact:
        exact = {k: exact[k] for k in keep}
    if two_sided and not (keep and keep[0] < 0 < keep[-1]):
        raise SymbolError("symbol needs nonzero negative and positive powers")
    return Symbol({k: floats[k] for k in keep}, exact if all_exact else None)


def evaluate(b: Symbol, z):
    """Value of ``b`` at ``z`` (scalar or array) by two Horner passes."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0) and b.r > 0:
        raise SymbolError("symbol has a pole at z = 0")
    r, s = b.r, b.s
    # nonnegative powers in z
    acc = np.zeros_like(z)
    for k in range(s, -1, -1):
        acc = acc * z + b.coeff(k)
    if r > 0:
        w = 1.0 / z
        neg = np.zeros_like(z)
        for k in range(-r, 0):
            neg = (neg + b.coeff(k)) * w
        acc = acc + neg
    return acc[()] if acc.ndim == 0 else acc


def derivative(b: Symbol) -> Symbol:
    """Symbol of ``b'``: power ``k-1`` carries ``k a_k``."""
    coeffs = {k - 1: k * c for k, c in b.coeffs.items() if k != 0}
    exact = None
    if b.exact is not None:
        exact = {k - 1: k * c for k, c in b.exact.items() if k != 0}
    return Symbol(coeffs, exact)


def critical_poly(b: Symbol) -> np.ndarray:
    """Ascending coefficients of ``z^{r+1} b'(z)`` (degree ``r+s``)."""
    r, s = b.r, b.s
    out = np.zeros(r + s + 1, dtype=complex)
    for k, c in b.coeffs.items():
        if k != 0:
            out[k + r] += k * c
    return out


def critical_points(b: Symbol, cluster_tol: float = 1e-7) -> list[CriticalPoint]:
    """Zeros of ``b'`` in the punctured plane with multiplicities.

    Rational symbols are split into square-free factors exactly, so
    multiple critical points are located to full precision.
    """
    if not any(k != 0 for k in b.coeffs):
        raise SymbolError("constant symbol has no critical points")
    from .polyroots import roots

    r = b.r
    if b.exact is not None:
        import flint

        num = [Fraction(0)] * (r + b.s + 1)
        for k, c in b.exact.items():
            if k != 0:
                num[k + r] += k * c
        poly = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in num])
        _, factors = poly.factor_squarefree()
        out: list[CriticalPoint] = []
        for fac, mult in factors:
            coeffs = [complex(float(fac[i])) for i in range(fac.degree() + 1)]
            if len(coeffs) < 2:
                continue
            for z in roots(coeffs):
                if z != 0:
                    out.append(CriticalPoint(complex(z), int(mult)))
        return sorted(out, key=lambda c: (c.value.real, c.value.imag))

    zs = roots(critical_poly(b))
    zs = zs[np.abs(zs) > 0]
    # merge numerically coincident roots
    used = np.zeros(len(zs), bool)
    out = []
    scale = max(1.0, float(np.max(np.abs(zs)))) if len(zs) else 1.0
    for i, z in enumerate(zs):
        if used[i]:
            continue
        close = (~used) & (np.abs(zs - z) <= cluster_tol * scale)
        used |= close
        out.append(CriticalPoint(complex(np.mean(zs[close])), int(close.sum())))
    return sorted(out, key=lambda c: (c.value.real, c.value.imag))


def _laurent_mul(a: np.ndarray, alo: int, b: np.ndarray, blo: int):
    return np.convolve(a, b), alo + blo


def compose_entire(f_taylor: Sequence[complex], b: Symbol,
                   truncation: tuple[int, int],
                   annulus: tuple[float, float] = (0.5, 2.0)) -> TruncatedSymbol:
    """Truncated Laurent expansion of ``f(b(z))`` for a Taylor polynomial f.

    The partial sum ``sum_m c_m b^m`` is formed exactly as a Laurent
    polynomial; powers outside ``[-R, S]`` are dropped and their sup-norm
    on the annulus ``rho_min <= |z| <= rho_max`` goes into ``tail_bound``.
    """
    R, S = truncation
    if R < 0 or S < 0:
        raise SymbolError("truncation bounds must be non-negative")
    lo_rad, hi_rad = annulus
    if not 0 < lo_rad <= hi_rad:
        raise SymbolError("invalid annulus")
    f = [complex(c) for c in f_taylor]
    first = next((m for m, c in enumerate(f) if m >= 1 and c != 0), None)
    if first is not None and (first * b.r > R or first * b.s > S):
        raise SymbolError("truncation excludes every nonconstant retained term")

    base = b.band_array()
    blo = -b.r
    total: dict[int, complex] = {}
    power = np.array([1.0 + 0j])
    plo = 0
    for m, c in enumerate(f):
        if m > 0:
            power, plo = _laurent_mul(power, plo, base, blo)
        if c == 0:
            continue
        for i, v in enumerate(power):
            k = plo + i
            total[k] = total.get(k, 0.0) + c * v

    kept, tail = {}, 0.0
    for k, v in total.items():
        if v == 0:
            continue
        if -R <= k <= S:
            kept[k] = v
        else:
            tail += abs(v) * max(lo_rad ** k, hi_rad ** k)
    return TruncatedSymbol(kept, None, tail_bound=float(tail), bounds=(R, S),
                           annulus=(lo_rad, hi_rad))


# -- JSON interchange ---------------------------------------------------------

def symbol_from_json(doc: str | Mapping) -> Symbol:
    """Parse ``{"coeffs": [{"k": .., "re": .., "im": ..} | {"k": .., "num": .., "den": ..}]}``."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SymbolError(f"invalid symbol JSON: {exc}") from None
    if not isinstance(doc, Mapping) or "coeffs" not in doc:
        raise SymbolError("symbol JSON needs a 'coeffs' list")
    entries = []
    for item in doc["coeffs"]:
        if "k" not in item:
            raise SymbolError("coefficient entry without 'k'")
        k = item["k"]
        if "num" in item:
            c = Fraction(int(item["num"]), int(item.get("den", 1)))
        else:
            re, im = float(item.get("re", 0.0)), float(item.get("im", 0.0))
            c = complex(re, im) if im else re
        entries.append((k, c))
    return make_symbol(entries, two_sided=False)


def symbol_to_json(b: Symbol, exact: bool = True) -> dict:
    items = []
    for k in b.powers:
        if exact and b.exact is not None:
            q = b.exact[k]
            items.append({"k": k, "num": str(q.numerator), "den": str(q.denominator)})
        else:
            c = complex(b.coeffs[k])
            items.append({"k": k, "re": c.real, "im": c.imag})
    return {"coeffs": items}
