"""Rendering of tradeoff curves to figure files.

Uses matplotlib's object API directly (no pyplot, no global state), so the
CLI can render headlessly and tests stay deterministic.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from matplotlib.figure import Figure

from .errors import InputError

_SEARCH_STYLES = {"THM2_EXACT", "THM3_BSC", "THM4_BEC"}


def save_rate_curve_figure(rows: Sequence[Mapping[str, object]],
                           path: str | Path,
                           capacity: float,
                           title: str | None = None) -> Path:
    """Render rate-vs-blocklength curves, one line per method, with the
    capacity and half-capacity reference levels, and save to ``path``.

    ``rows`` are curve records carrying at least n, method, and rate.
    The file format follows the path suffix (png/pdf/svg).
    """
    if not rows:
        raise InputError("no rows to plot")
    by_method: dict[str, list[tuple[int, float]]] = {}
    for row in rows:
        by_method.setdefault(str(row["method"]), []).append(
            (int(row["n"]), float(row["rate"])))

    fig = Figure(figsize=(6.4, 4.2))
    ax = fig.add_subplot(111)
    for method, pts in by_method.items():
        pts.sort()
        ns = [n for n, _ in pts]
        rates = [r for _, r in pts]
        marker = "o" if method in _SEARCH_STYLES else None
        ax.semilogx(ns, rates, marker=marker, markersize=3.5, label=method)
    ax.axhline(capacity, color="gray", linestyle=":", linewidth=1.0,
               label="capacity")
    ax.axhline(capacity / 2.0, color="gray", linestyle="--", linewidth=1.0,
               label="half capacity")
    ax.set_xlabel("blocklength n")
    ax.set_ylabel("rate  log2(M) / log2(n)")
    ax.set_ylim(bottom=0.0)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    out = Path(path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    return out
