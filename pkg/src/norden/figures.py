"""Figure rendering for verification reports.

Non-interactive by design: figures go straight to PNG files next to the
report so a run leaves a browsable record.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .connections import TABLE1_COLUMNS, TABLE1_ROWS, _slug
from .report import Report

_FLOOR = 1e-17


def render_residual_figure(report: Report, path: str | Path) -> Path:
    """Horizontal bar chart of residuals against tolerances, log scale."""
    path = Path(path)
    checks = list(report)
    if not checks:
        fig, ax = plt.subplots(figsize=(6, 2))
        ax.text(0.5, 0.5, "empty report", ha="center", va="center")
        ax.set_axis_off()
    else:
        height = max(2.5, 0.28 * len(checks) + 1.2)
        fig, ax = plt.subplots(figsize=(10, height))
        names = [c.check for c in checks]
        resid = np.array([max(abs(c.residual), _FLOOR) for c in checks])
        resid[~np.isfinite(resid)] = 1e3
        tol = np.array([max(c.tolerance, _FLOOR) for c in checks])
        y = np.arange(len(checks))
        colors = ["#2a7e43" if c.passed else "#b3362b" for c in checks]
        ax.barh(y, np.log10(resid) - math.log10(_FLOOR),
                left=math.log10(_FLOOR), color=colors, height=0.6)
        for yy, t in zip(y, tol):
            ax.plot([math.log10(t)] * 2, [yy - 0.4, yy + 0.4],
                    color="black", lw=1.2)
        ax.set_yticks(y, names, fontsize=7)
        ax.invert_yaxis()
        ax.set_xlabel("log10 residual (tick = tolerance)")
        ax.set_title("verification residuals")
        ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_table1_figure(report: Report, path: str | Path) -> Path:
    """Pass/fail matrix for the connection-type decision table."""
    path = Path(path)
    grid = np.full((len(TABLE1_ROWS), len(TABLE1_COLUMNS)), np.nan)
    annot = [["" for _ in TABLE1_COLUMNS] for _ in TABLE1_ROWS]
    for r, row in enumerate(TABLE1_ROWS):
        for c, col in enumerate(TABLE1_COLUMNS):
            name = f"table1.{_slug(row)}.{_slug(col)}"
            related = [
                ck for ck in report
                if ck.check == name or ck.check == name + ".nonexistence"
            ]
            if not related:
                continue
            ok = all(ck.passed for ck in related)
            grid[r, c] = 1.0 if ok else 0.0
            exists = not any(ck.check.endswith(".nonexistence") for ck in related)
            label = "ok" if ok else "FAIL"
            annot[r][c] = label if exists else f"none\n({label})"
    fig, ax = plt.subplots(figsize=(7, 4))
    cmap = matplotlib.colors.ListedColormap(["#b3362b", "#2a7e43"])
    ax.imshow(np.nan_to_num(grid, nan=0.5), cmap=cmap, vmin=0, vmax=1, alpha=0.75)
    ax.set_xticks(range(len(TABLE1_COLUMNS)), TABLE1_COLUMNS)
    ax.set_yticks(range(len(TABLE1_ROWS)), TABLE1_ROWS)
    for r in range(len(TABLE1_ROWS)):
        for c in range(len(TABLE1_COLUMNS)):
            ax.text(c, r, annot[r][c], ha="center", va="center", fontsize=9)
    ax.set_title("connection types by structure class")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report_figures(report: Report, out_dir: str | Path,
                          stem: str = "report") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [render_residual_figure(report, out_dir / f"{stem}_residuals.png")]
    if any(c.check.startswith("table1.") for c in report):
        paths.append(render_table1_figure(report, out_dir / f"{stem}_table1.png"))
    return paths
