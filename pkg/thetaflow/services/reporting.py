"""
ThetaFlow – Reports
====================
CSV tables (pandas) and SVG figures (matplotlib, Agg) for runs, convergence
studies, regularity sweeps and the stability cross-check.

CSV files carry full precision (``%.17g``), UTF-8, LF line endings, and no
timing columns, so the same config always produces the same bytes.  SVGs use
a fixed hash salt and no date stamp for the same reason.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from loguru import logger  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from thetaflow.core.grid import FieldState, GridSpec  # noqa: E402
from thetaflow.features.vonneumann import StabilityVerdict  # noqa: E402
from thetaflow.services.harness import ConvergenceReport, SweepPoint  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "thetaflow"
matplotlib.rcParams["svg.fonttype"] = "path"

CSV_OPTIONS = dict(index=False, float_format="%.17g", na_rep="", lineterminator="\n", encoding="utf-8")
SVG_METADATA = {"Date": None}
CONVERGENCE_COLUMNS = ["J", "dx", "l2_error", "observed_order", "theoretical_order", "status"]
SWEEP_COLUMNS = ["m", "observed_order", "theoretical_order"]


# ─────────────────────────────────────────────────────────────────────────────
# Frames
# ─────────────────────────────────────────────────────────────────────────────
def convergence_frame(report: ConvergenceReport) -> pd.DataFrame:
    """One row per resolution, coarsest first; the first order cell is empty."""
    frame = pd.DataFrame(
        {
            "J": [row.J for row in report.rows],
            "dx": [row.dx for row in report.rows],
            "l2_error": [row.l2_error for row in report.rows],
            "observed_order": [row.observed_order for row in report.rows],
            "theoretical_order": [report.theoretical_order] * len(report.rows),
            "status": [row.status for row in report.rows],
        },
        columns=CONVERGENCE_COLUMNS,
    )
    frame["observed_order"] = frame["observed_order"].astype(float)
    return frame


def state_frame(grid: GridSpec, numerical: FieldState, exact: Optional[FieldState] = None) -> pd.DataFrame:
    """Cell centres with the numerical cell averages and, if given, the exact ones."""
    numerical.conforms_to(grid)
    frame = pd.DataFrame({"x": (np.arange(grid.cell_count) + 0.5) * grid.dx, "value": numerical.values})
    if exact is not None:
        exact.conforms_to(grid)
        frame["exact"] = exact.values
    return frame


def sweep_frame(points: Sequence[SweepPoint]) -> pd.DataFrame:
    frame = pd.DataFrame(
        {
            "m": [pt.m for pt in points],
            "observed_order": [pt.observed for pt in points],
            "theoretical_order": [pt.theoretical for pt in points],
        },
        columns=SWEEP_COLUMNS,
    )
    frame["observed_order"] = frame["observed_order"].astype(float)
    return frame


def stability_frame(verdicts: Sequence[StabilityVerdict]) -> pd.DataFrame:
    return pd.DataFrame([v.to_dict() for v in verdicts])


def format_table(frame: pd.DataFrame) -> str:
    """Console rendering with 6 significant digits."""
    return frame.to_string(index=False, float_format=lambda v: f"{v:.6g}", na_rep="")


# ─────────────────────────────────────────────────────────────────────────────
# Writers
# ─────────────────────────────────────────────────────────────────────────────
def write_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, **CSV_OPTIONS)
    logger.info("💾 Wrote {} ({} rows)", path, len(frame))
    return path


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    logger.info("🖼️  Wrote {}", path)
    return path


def plot_convergence(report: ConvergenceReport, path: str | Path) -> Path:
    """Log-log error against dx with a reference slope at the theoretical order."""
    ok = [row for row in report.rows if row.ok and row.l2_error > 0]
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    if ok:
        dx = np.array([row.dx for row in ok])
        err = np.array([row.l2_error for row in ok])
        ax.loglog(dx, err, "o-", label="ℓ² error")
        slope = report.theoretical_order
        if np.isfinite(slope) and slope > 0:
            ax.loglog(dx, err[0] * (dx / dx[0]) ** slope, "--", label=f"slope {slope:.3f}")
        ax.legend()
    ax.set_xlabel("dx")
    ax.set_ylabel("error")
    ax.set_title(f"{report.scheme.label} | {report.datum.label}")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_state(frame: pd.DataFrame, path: str | Path, title: str = "") -> Path:
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(frame["x"], frame["value"], label="numerical")
    if "exact" in frame:
        ax.plot(frame["x"], frame["exact"], "--", label="exact")
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_sweep(frame: pd.DataFrame, path: str | Path, p: int) -> Path:
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    ax.plot(frame["m"], frame["theoretical_order"], "-", label="theoretical")
    ax.plot(frame["m"], frame["observed_order"], "o", label="observed")
    ax.set_xlabel("m")
    ax.set_ylabel("order")
    ax.set_title(f"orders against regularity, p={p}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


# ─────────────────────────────────────────────────────────────────────────────
# Bundles
# ─────────────────────────────────────────────────────────────────────────────
def write_convergence_report(report: ConvergenceReport, out_dir: str | Path, stem: str = "convergence") -> List[Path]:
    out_dir = Path(out_dir)
    frame = convergence_frame(report)
    return [
        write_csv(frame, out_dir / f"{stem}.csv"),
        plot_convergence(report, out_dir / f"{stem}.svg"),
    ]


def write_sweep_report(points: Sequence[SweepPoint], out_dir: str | Path, p: int) -> List[Path]:
    """One CSV per m, ``sweep_summary.csv`` and an orders-against-m SVG."""
    out_dir = Path(out_dir)
    paths: List[Path] = []
    for point in points:
        paths.append(write_csv(convergence_frame(point.report), out_dir / f"convergence_m{point.m:g}.csv"))
    summary = sweep_frame(points)
    paths.append(write_csv(summary, out_dir / "sweep_summary.csv"))
    paths.append(plot_sweep(summary, out_dir / "sweep_orders.svg", p))
    return paths
