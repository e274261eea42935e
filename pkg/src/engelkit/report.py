"""Figures for the CLI report path (growth curves, degree curves, Engel profiles)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402

WIDTH = 5.5


def _setup():
    plt.rcParams.update({
        "figure.dpi": 120,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "axes.spines.top": False,
        "axes.spines.right": False,
        "font.size": 9,
    })


def save_fig(fig, path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def plot_growth(sizes, path, label: str = "") -> str:
    """Ball size against radius on a log scale."""
    _setup()
    fig, ax = plt.subplots(figsize=(WIDTH, WIDTH * 0.6))
    radii = list(range(len(sizes)))
    ax.plot(radii, sizes, marker="o", lw=1.2)
    ax.set_yscale("log")
    ax.set_xlabel("radius")
    ax.set_ylabel("ball size")
    ax.set_title(f"growth {label}".strip())
    return save_fig(fig, path)


def plot_degree_curve(rows, path, label: str = "", n: int = 1) -> str:
    """``rows`` as returned by ``degree_ball_estimate``: (radius, size, ratio, exact)."""
    _setup()
    fig, ax = plt.subplots(figsize=(WIDTH, WIDTH * 0.6))
    radii = [r[0] for r in rows]
    ratios = [float(r[2]) for r in rows]
    exact = [r[3] for r in rows]
    ax.plot(radii, ratios, lw=1.2, color="0.4")
    ax.scatter([r for r, e in zip(radii, exact) if e], [v for v, e in zip(ratios, exact) if e],
               label="exact", zorder=3)
    ax.scatter([r for r, e in zip(radii, exact) if not e], [v for v, e in zip(ratios, exact) if not e],
               marker="x", label="sampled", zorder=3)
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("radius")
    ax.set_ylabel(f"trivial {n + 1}-fold commutators")
    ax.set_title(f"ball degree {label}".strip())
    ax.legend(frameon=False)
    return save_fig(fig, path)


def plot_engel_profile(counts: dict, undetermined: int, path, label: str = "", side: str = "right") -> str:
    """Bar chart: number of elements whose least bounded Engel length is n."""
    _setup()
    fig, ax = plt.subplots(figsize=(WIDTH, WIDTH * 0.5))
    ns = sorted(counts)
    ax.bar([str(n) for n in ns], [counts[n] for n in ns])
    if undetermined:
        ax.bar(["?"], [undetermined], color="0.6")
    ax.set_xlabel(f"least {side} Engel length")
    ax.set_ylabel("elements")
    ax.set_title(f"Engel profile {label}".strip())
    return save_fig(fig, path)


def plot_bench(rows, path, label: str = "") -> str:
    """``rows``: (operation, microseconds per op)."""
    _setup()
    fig, ax = plt.subplots(figsize=(WIDTH, WIDTH * 0.5))
    ax.barh([r[0] for r in rows], [r[1] for r in rows])
    ax.set_xlabel("microseconds per operation")
    ax.set_title(f"bench {label}".strip())
    return save_fig(fig, path)
