"""Figures written to files next to the JSON reports."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_tv_curve(tv: Sequence[float], bound: Sequence[float], path, title: str = "") -> Path:
    """Exact TV distance against the analytic mixing bound, log scale."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ts = range(len(tv))
    ax.semilogy(ts, [max(float(v), 1e-300) for v in tv], label="exact TV", marker=".", lw=1)
    ax.semilogy(ts, [min(float(b), 1.0) for b in bound], label="bound (capped at 1)", ls="--")
    ax.set_xlabel("step t")
    ax.set_ylabel("total variation")
    ax.set_title(title or "distance to stationarity")
    ax.legend()
    return _save(fig, path)


def plot_solutions(records: Sequence[dict], path, title: str = "") -> Path:
    """Solution vectors of every pinning; negative entries in red."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for rec in records:
        xs = [float(Fraction(v)) for v in rec["solution"]]
        label = f"({rec['zeros']},{rec['ones']})"
        ax.plot(range(len(xs)), xs, marker="o", ms=3, lw=0.8, label=label)
        for j, v in enumerate(xs):
            if v < 0:
                ax.plot(j, v, "rx", ms=9)
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("mixed pairs j")
    ax.set_ylabel("solution entry")
    ax.set_title(title or "pinned systems")
    if len(records) <= 12:
        ax.legend(fontsize=6, ncol=2)
    return _save(fig, path)


def plot_marginals(marginals: Sequence[dict], path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    edges = [r["edge"] for r in marginals]
    ps = [float(r["estimated_p"]) for r in marginals]
    ax.bar(edges, ps, color=["tab:blue" if r["pinned_value"] else "tab:orange" for r in marginals])
    ax.axhline(0.25, color="r", ls=":", lw=1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("edge (pinning order)")
    ax.set_ylabel("majority marginal")
    ax.set_title(title or "telescoping marginals (blue: pinned to 1)")
    return _save(fig, path)
