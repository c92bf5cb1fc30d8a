"""``bandtoep`` command line.

Every subcommand reads one symbol (inline JSON, a JSON file or a fixture
name) and writes CSV with a fixed header, or one JSON document with
``--format json``.  Exit codes: 0 success, 1 numerical failure (error JSON
on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .symbol import Symbol, SymbolError, symbol_from_json, symbol_to_json

__all__ = ["main", "run", "RunConfig", "build_parser"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Parsed invocation: the subcommand, its symbol and the output settings."""

    command: str
    symbol: Symbol | None
    fmt: str
    output: str | None
    plot: str | None
    threads: int | None
    seed: int
    args: argparse.Namespace


# -- parser ------------------------------------------------------------------------

_UNITS = {
    "eig": "Units: eigenvalues in the units of the symbol coefficients.",
    "limit-set": "Units: lambda in symbol units; --tol is an absolute modulus gap.",
    "net": "Units: z is the symbol variable; --window takes ln|z| bounds.",
    "curve": "Units: t in radians on [0, pi]; rho = |gamma(t)| in units of z.",
    "class-r": "Units: witness eigenvalue in symbol units; n is a matrix size.",
    "moments": "Units: h_m in (symbol units)^m.",
    "hankel": "Units: det H_n in (symbol units)^(n(n-1)); MC std_error in the same units.",
    "jacobi": "Units: a_n and b_n in symbol units.",
    "density": "Units: x in symbol units; rho in 1/(symbol units).",
    "mfunc": "Units: lambda in symbol units; m(lambda) in 1/(symbol units).",
    "hist": "Units: bin edges in symbol units; counts are eigenvalues per segment.",
    "fixtures": "Units: none.",
}


def _common(p: argparse.ArgumentParser, needs_symbol: bool = True) -> None:
    if needs_symbol:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--symbol", help='inline JSON, e.g. \'{"coeffs":[{"k":-1,"num":"1","den":"1"}, ...]}\'')
        src.add_argument("--symbol-file", help="path to a symbol JSON file")
        src.add_argument("--fixture", help="named fixture (see the fixtures subcommand)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--plot", help="also write a figure to this path (png, pdf, svg)")
    p.add_argument("--threads", type=int, help="worker cap (default: BANDTOEP_THREADS or all cores)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")


def _sub(sp, name: str, helptext: str, needs_symbol: bool = True) -> argparse.ArgumentParser:
    p = sp.add_parser(name, help=helptext, description=f"{helptext}. {_UNITS[name]}")
    _common(p, needs_symbol)
    return p


def _positive(kind):
    def conv(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v
    return conv


def _even_samples(s):
    v = int(s)
    if v < 8 or v % 2:
        raise argparse.ArgumentTypeError(f"must be an even integer >= 8, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bandtoep",
                                 description="Real spectra of banded Toeplitz matrices: limiting sets, "
                                             "limiting measures and their Jacobi operators.")
    sp = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = _sub(sp, "eig", "eigenvalues of the n x n section T_n(b)")
    p.add_argument("-n", type=_positive(int), required=True, help="matrix size")

    p = _sub(sp, "limit-set", "point cloud of the limiting set by the root-modulus criterion")
    p.add_argument("--resolution", type=_positive(int), default=512, help="grid points per side (default 512)")
    p.add_argument("--tol", type=_positive(float), default=1e-6, help="defect tolerance (default 1e-6)")
    p.add_argument("--region", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"),
                   help="scan window (default: the norm-bound square)")

    p = _sub(sp, "net", "polylines of the net b^{-1}(R) on a log-polar grid")
    p.add_argument("--grid", type=_positive(int), default=1024, help="grid points per axis (default 1024)")
    p.add_argument("--window", type=float, nargs=2, metavar=("LNR0", "LNR1"), help="ln|z| range")

    p = _sub(sp, "curve", "polar trace of the Jordan curve in b^{-1}(R) with its critical partition")
    p.add_argument("-N", type=_even_samples, default=1024, help="samples on [-pi, pi], even, >= 8 (default 1024)")

    p = _sub(sp, "class-r", "decide membership in class R with a certificate or a witness")
    p.add_argument("--n-probe", type=_positive(int), default=40, help="largest section probed for a witness (default 40)")

    p = _sub(sp, "moments", "moments h_m = constant term of b^m")
    p.add_argument("-m", type=int, required=True, help="largest moment index")
    p.add_argument("--float", action="store_true", help="floating point instead of exact rationals")

    p = _sub(sp, "hankel", "Hankel determinants det H_n, det H~_n and the positivity test")
    p.add_argument("-n", type=_positive(int), required=True, help="largest order")
    p.add_argument("--mc", action="store_true", help="Monte Carlo estimate of det H_n from the Vandermonde integral")
    p.add_argument("--samples", type=_positive(int), default=100_000, help="Monte Carlo samples (default 1e5)")

    p = _sub(sp, "jacobi", "Jacobi parameters a_n, b_n from the moments")
    p.add_argument("-N", type=_positive(int), required=True, help="number of parameter pairs")
    p.add_argument("--mode", choices=("exact", "chebyshev"), default="exact")

    p = _sub(sp, "density", "density of the limiting measure")
    p.add_argument("-K", type=_positive(int), default=200, help="interior nodes per branch (default 200)")
    p.add_argument("--method", choices=("curve", "m"), default="curve",
                   help="curve: push-forward along the Jordan curve; m: Stieltjes inversion of the m-function")

    p = _sub(sp, "mfunc", "Weyl m-function m(lambda)")
    p.add_argument("--lambda", dest="lam", action="append", required=True,
                   help="spectral parameter, e.g. 3 or 1+2j (repeatable)")

    p = _sub(sp, "hist", "histogram of the eigenvalues of T_n(b)")
    p.add_argument("-n", type=_positive(int), required=True, help="matrix size")
    p.add_argument("--bins", type=_positive(int), default=20, help="number of segments (default 20)")
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"), help="histogram range")

    _sub(sp, "fixtures", "list the named fixtures", needs_symbol=False)
    return ap


# -- helpers -----------------------------------------------------------------------

def _load_symbol(ns) -> Symbol | None:
    from .oracles import get_fixture

    try:
        if getattr(ns, "fixture", None):
            return get_fixture(ns.fixture)
        if getattr(ns, "symbol_file", None):
            with open(ns.symbol_file) as fh:
                return symbol_from_json(fh.read())
        if getattr(ns, "symbol", None):
            return symbol_from_json(ns.symbol)
    except (KeyError, OSError, SymbolError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    return None


def _num(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


class _Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.rows: list = []
        self.header: list[str] | None = None
        self.doc: dict = {}

    def table(self, header, rows):
        self.header = list(header)
        self.rows = [[_num(v) for v in r] for r in rows]

    def render(self) -> str:
        if self.fmt == "json":
            return json.dumps(self.doc, sort_keys=False, default=_num) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow(["" if v is None else v for v in r])
        return buf.getvalue()


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex number {s!r}") from None


# -- commands ----------------------------------------------------------------------

def _cmd_eig(cfg, out):
    from .toeplitz import eigenvalues

    rep = eigenvalues((cfg.symbol, cfg.args.n))
    ev = rep.eigenvalues
    out.table(["re", "im"], [(float(z.real), float(z.imag)) for z in ev])
    out.doc = {"n": cfg.args.n, "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
               "max_imag": rep.max_imag, "scaling": rep.scaling}
    if cfg.plot:
        from .plotting import plot_eigenvalues
        plot_eigenvalues(ev, cfg.plot)


def _cmd_limit_set(cfg, out):
    from .limitset import limiting_set_scan

    a = cfg.args
    cloud = limiting_set_scan(cfg.symbol, tuple(a.region) if a.region else None, a.resolution, a.tol,
                              threads=cfg.threads)
    out.table(["re", "im", "defect"], cloud.to_rows())
    out.doc = {"region": list(cloud.region), "resolution": cloud.resolution, "grid_step": cloud.grid_step,
               "points": [list(r) for r in cloud.to_rows()], "real_fraction": cloud.real_fraction()}
    if cfg.plot:
        from .plotting import plot_cloud
        plot_cloud(cloud, cfg.plot)


def _cmd_net(cfg, out):
    from .curve import compute_net

    a = cfg.args
    net = compute_net(cfg.symbol, tuple(a.window) if a.window else None, (a.grid, a.grid))
    rows = [(i, float(z.real), float(z.imag)) for i, line in enumerate(net.polylines) for z in line]
    out.table(["line", "re", "im"], rows)
    out.doc = {"window": list(net.window), "grid": list(net.grid), "residual": net.residual,
               "separates_zero_infinity": net.separates_zero_infinity(), "polylines": net.to_json()}
    if cfg.plot:
        from .plotting import plot_net
        plot_net(net, cfg.plot)


def _cmd_curve(cfg, out):
    from .curve import trace_polar

    c = trace_polar(cfg.symbol, cfg.args.N)
    z = c.gamma
    out.table(["t", "rho", "re", "im", "value"],
              [(float(t), float(r), float(w.real), float(w.imag), float(v))
               for t, r, w, v in zip(c.t, c.rho, z, c.values)])
    out.doc = {"t": c.t.tolist(), "rho": c.rho.tolist(), "values": c.values.tolist(),
               "residual": c.residual, "partition": list(map(float, c.partition)),
               "intervals": [{"alpha": iv.alpha, "beta": iv.beta, "orientation": iv.orientation}
                             for iv in c.intervals]}
    if cfg.plot:
        from .plotting import plot_curve
        plot_curve(c, cfg.plot)


def _cmd_class_r(cfg, out):
    from .curve import is_class_R

    v = is_class_R(cfg.symbol, n_probe=cfg.args.n_probe)
    n, lam = v.witness if v.witness is not None else (None, None)
    out.table(["verdict", "witness_n", "witness_re", "witness_im"],
              [(v.verdict, n, None if lam is None else lam.real, None if lam is None else lam.imag)])
    out.doc = v.to_dict()


def _cmd_moments(cfg, out):
    from .moments import moments

    ms = moments(cfg.symbol, cfg.args.m, exact=False if cfg.args.float else None)
    if ms.exact:
        out.table(["m", "num", "den"], [(m, h.numerator, h.denominator) for m, h in enumerate(ms.values)])
        out.doc = {"exact": True, "moments": [str(h) for h in ms.values]}
    else:
        vals = ms.as_float()
        out.table(["m", "value"], [(m, _num(h)) for m, h in enumerate(vals)])
        out.doc = {"exact": False, "moments": [_num(h) for h in vals]}


def _cmd_hankel(cfg, out):
    from .moments import hankel, hankel_det_mc, hankel_positivity, moments

    a = cfg.args
    b = cfg.symbol
    if a.mc:
        est = hankel_det_mc(b, a.n, samples=a.samples, seed=cfg.seed, threads=cfg.threads)
        out.table(["n", "det", "mode", "std_error"], [(a.n, est.estimate, "monte-carlo", est.std_error)])
        out.doc = {"n": a.n, "det": est.estimate, "mode": "monte-carlo", "std_error": est.std_error,
                   "samples": est.samples, "seed": est.seed}
        return
    ms = moments(b, 2 * a.n)
    rows, docs = [], []
    for n in range(1, a.n + 1):
        hd = hankel(ms, n)
        rows.append((n, _num(hd.det_H), _num(hd.det_Htilde), hd.mode))
        docs.append({"n": n, "det": _num(hd.det_H), "det_tilde": _num(hd.det_Htilde), "mode": hd.mode})
    out.table(["n", "det", "det_tilde", "mode"], rows)
    out.doc = {"determinants": docs, "positivity": hankel_positivity(ms, a.n).to_dict()}


def _cmd_jacobi(cfg, out):
    from .measure import jacobi_params
    from .moments import moments

    a = cfg.args
    ms = moments(cfg.symbol, 2 * a.N)
    J = jacobi_params(ms, a.N, a.mode)
    out.table(["n", "a_n", "b_n", "mode"], J.to_rows())
    out.doc = {"mode": J.mode, "n_reliable": J.n_reliable, "a": J.a.tolist(), "b": J.b.tolist()}
    if J.a_sq is not None:
        out.doc["a_sq_exact"] = [str(q) for q in J.a_sq]
        out.doc["b_exact"] = [str(q) for q in J.b_exact]


def _cmd_density(cfg, out):
    from .curve import trace_polar
    from .measure import density_from_curve, density_from_m

    b = cfg.symbol
    D = density_from_curve(b, trace_polar(b), cfg.args.K)
    vals = D.values
    if cfg.args.method == "m":
        vals = np.array([density_from_m(b, float(x)) for x in D.x])
    out.table(["x", "rho", "branch"], [(float(x), float(v), int(i)) for x, v, i in zip(D.x, vals, D.branch)])
    out.doc = {"support": list(D.support), "method": cfg.args.method, "x": D.x.tolist(),
               "rho": vals.tolist(), "branch": D.branch.tolist()}
    if cfg.plot:
        from .plotting import plot_density
        plot_density(D, cfg.plot)


def _cmd_mfunc(cfg, out):
    from .measure import weyl_m

    lams = [_parse_complex(s) for s in cfg.args.lam]
    vals = [weyl_m(cfg.symbol, lam) for lam in lams]
    out.table(["re", "im", "m_re", "m_im"], [(l.real, l.imag, v.real, v.imag) for l, v in zip(lams, vals)])
    out.doc = {"values": [{"lambda": [l.real, l.imag], "m": [v.real, v.imag]} for l, v in zip(lams, vals)]}


def _cmd_hist(cfg, out):
    from .toeplitz import eigenvalues

    a = cfg.args
    ev = eigenvalues((cfg.symbol, a.n)).eigenvalues.real
    rng = tuple(a.range) if a.range else (float(ev.min()), float(ev.max()))
    counts, edges = np.histogram(ev, bins=a.bins, range=rng)
    out.table(["bin_lo", "bin_hi", "count"],
              [(float(lo), float(hi), int(c)) for lo, hi, c in zip(edges[:-1], edges[1:], counts)])
    out.doc = {"n": a.n, "edges": edges.tolist(), "counts": counts.tolist(), "outside": int(a.n - counts.sum())}
    if cfg.plot:
        from .plotting import plot_hist
        plot_hist(edges, counts, cfg.plot)


def _cmd_fixtures(cfg, out):
    from .oracles import FIXTURE_NOTES, fixtures

    fx = fixtures()
    out.table(["name", "r", "s", "description"], [(k, b.r, b.s, FIXTURE_NOTES.get(k, "")) for k, b in fx.items()])
    out.doc = {"fixtures": [{"name": k, "r": b.r, "s": b.s, "description": FIXTURE_NOTES.get(k, ""),
                             "symbol": symbol_to_json(b)} for k, b in fx.items()]}


_COMMANDS = {
    "eig": _cmd_eig, "limit-set": _cmd_limit_set, "net": _cmd_net, "curve": _cmd_curve,
    "class-r": _cmd_class_r, "moments": _cmd_moments, "hankel": _cmd_hankel, "jacobi": _cmd_jacobi,
    "density": _cmd_density, "mfunc": _cmd_mfunc, "hist": _cmd_hist, "fixtures": _cmd_fixtures,
}


# -- entry points ------------------------------------------------------------------

def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(ns.command, _load_symbol(ns), ns.format, ns.output, ns.plot, ns.threads, ns.seed, ns)
        if cfg.threads is not None and cfg.threads < 1:
            raise UsageError("--threads must be positive")
        out = _Out(cfg.fmt)
        _COMMANDS[cfg.command](cfg, out)
        text = out.render()
        if cfg.output:
            with open(cfg.output, "w") as fh:
                fh.write(text)
    except (UsageError, OSError) as exc:
        print(f"bandtoep {ns.command}: error: {exc}", file=stderr)
        return 2
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "command": ns.command}), file=stderr)
        return 1
    if not cfg.output:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
