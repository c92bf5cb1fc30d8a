"""Static figures written straight to disk (Agg backend, no display)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_net", "plot_cloud", "plot_curve", "plot_density", "plot_hist", "plot_eigenvalues"]


def _save(fig, path: str) -> None:
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)


def plot_net(net, path: str, curve=None) -> None:
    """Net polylines; the traced Jordan curve on top when given."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for line in net.polylines:
        ax.plot(line.real, line.imag, color="0.2", lw=0.8)
    if curve is not None:
        g = curve.gamma
        ax.plot(g.real, g.imag, color="C3", lw=1.5)
        ax.plot(g.real, -g.imag, color="C3", lw=1.5)
    ax.plot([0], [0], "k+")
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    _save(fig, path)


def plot_cloud(cloud, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(cloud.points.real, cloud.points.imag, ".", ms=1.5, color="C0")
    x0, x1, y0, y1 = cloud.region
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Im lambda")
    _save(fig, path)


def plot_curve(curve, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    g = curve.gamma
    ax.plot(np.concatenate([g.real, g.real[::-1]]), np.concatenate([g.imag, -g.imag[::-1]]), color="C3")
    for p in curve.partition[1:-1]:
        z = curve.points(np.array([p]))[0]
        ax.plot([z.real], [z.imag], "ko", ms=4)
    ax.plot([0], [0], "k+")
    ax.set_aspect("equal")
    _save(fig, path)


def plot_density(samples, path: str, branches: bool = True) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    if branches and samples.measure is not None and len(samples.measure.branches) > 1:
        for i, br in enumerate(samples.measure.branches):
            x = np.linspace(br.lo, br.hi, 402)[1:-1]
            ax.plot(x, samples.measure.branch_pdf(x, i), lw=0.8, label=f"mu_{i + 1}")
        ax.legend()
    ax.plot(samples.x, samples.values, color="k", lw=1.2)
    lo, hi = samples.support
    top = np.quantile(samples.values, 0.95) * 2 if samples.values.size else 1.0
    ax.set_xlim(lo, hi)
    ax.set_ylim(0, top)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    _save(fig, path)


def plot_hist(edges: np.ndarray, counts: np.ndarray, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.stairs(counts, edges, fill=True, color="C0")
    ax.set_xlabel("lambda")
    ax.set_ylabel("eigenvalues per segment")
    _save(fig, path)


def plot_eigenvalues(ev: np.ndarray, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(ev.real, ev.imag, ".", ms=2)
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Im lambda")
    _save(fig, path)
