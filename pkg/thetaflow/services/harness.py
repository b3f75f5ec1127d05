"""
ThetaFlow – Convergence Harness
================================
Runs convergence studies end to end.

A study evolves the projected datum at every J in the config to time T and
measures the ℓ²_Δ error either against the 2J run coarsened back to J cells
(refinement pair) or against the exact cell averages (exact reference).
Rows run concurrently on a thread pool; orders are attached after the join.

Usage:
    from thetaflow.services.harness import run_convergence_study
    report = run_convergence_study(config)
    print(report.final_order, report.theoretical_order)
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from loguru import logger

from thetaflow.config import settings
from thetaflow.core.exceptions import (
    BlowUpError,
    ConfigError,
    DegenerateErrorValue,
    SingularSymbolError,
)
from thetaflow.core.grid import GridSpec
from thetaflow.features.analysis import (
    RatePrediction,
    convergence_error,
    observed_order,
    theoretical_order,
    time_sampled_error,
)
from thetaflow.features.initial_data import InitialDatum, cell_average_projection
from thetaflow.features.reference import coarsen_by_cell_average
from thetaflow.features.stencil import SchemeSpec, build_stencil
from thetaflow.features.timestepper import build_step_operator, evolve
from thetaflow.features.vonneumann import Verdict, table_prediction
from thetaflow.schemas.experiment import Comparison, DatumConfig, ExperimentConfig

STATUS_OK = "ok"
STATUS_UNSTABLE = "unstable"


# ─────────────────────────────────────────────────────────────────────────────
# Data Classes
# ─────────────────────────────────────────────────────────────────────────────
@dataclass
class ConvergenceRow:
    J:              int
    dx:             float
    dt:             float
    n_steps:        int
    l2_error:       float = math.nan
    observed_order: Optional[float] = None
    status:         str = STATUS_OK
    detail:         str = ""
    wall_clock:     float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass
class ConvergenceReport:
    scheme:            SchemeSpec
    datum:             InitialDatum
    rows:              List[ConvergenceRow]
    prediction:        RatePrediction
    config:            dict = field(default_factory=dict)
    cfl_violations:    List[int] = field(default_factory=list)

    @property
    def theoretical_order(self) -> float:
        return self.prediction.overall_order_under_coupling

    @property
    def orders(self) -> List[float]:
        return [row.observed_order for row in self.rows if row.observed_order is not None]

    @property
    def final_order(self) -> Optional[float]:
        orders = self.orders
        return orders[-1] if orders else None

    def mean_order(self, last: int = 3) -> Optional[float]:
        """Mean of the last ``last`` observed orders (the finest pairs)."""
        orders = self.orders[-last:]
        return sum(orders) / len(orders) if orders else None

    @property
    def unstable_rows(self) -> List[ConvergenceRow]:
        return [row for row in self.rows if not row.ok]


@dataclass(frozen=True)
class SweepPoint:
    m:           float
    observed:    Optional[float]
    theoretical: float
    report:      ConvergenceReport = field(repr=False, compare=False)


# ─────────────────────────────────────────────────────────────────────────────
# Rows
# ─────────────────────────────────────────────────────────────────────────────
def _grid(config: ExperimentConfig, cells: int) -> GridSpec:
    """
    Coupled grid for ``cells``, anchored at the coarsest J₀ of the study.

    When (J/J₀)^α is a whole number the step count is N₀·(J/J₀)^α, so every
    resolution keeps the same dt/dx^α and the 2J run of a refinement pair
    takes exactly 2^α times as many steps.  Otherwise dt is snapped on its own.
    """
    anchor = GridSpec.coupled(config.domain_length, config.J_list[0], config.T, config.alpha)
    scale = (cells / anchor.cell_count) ** config.alpha
    whole = round(scale)
    if cells % anchor.cell_count or whole < 1 or abs(scale - whole) > 1e-9 * whole:
        return GridSpec.coupled(config.domain_length, cells, config.T, config.alpha)
    return anchor.with_cells(cells, config.T / (anchor.step_count * whole))


def _cfl_violations(config: ExperimentConfig, scheme: SchemeSpec) -> List[int]:
    """Rows whose run (or 2J partner) the closed-form table predicts unstable."""
    factors = (1, 2) if config.comparison is Comparison.REFINEMENT_PAIR else (1,)
    flagged = []
    for J in config.J_list:
        grids = [_grid(config, f * J) for f in factors]
        if any(
            table_prediction(scheme, g.dt, g.dx, config.growth_constant) is Verdict.UNSTABLE
            for g in grids
        ):
            flagged.append(J)
    return flagged


def _check_step_budget(config: ExperimentConfig) -> None:
    finest = config.J_list[-1] * (2 if config.comparison is Comparison.REFINEMENT_PAIR else 1)
    n_steps = _grid(config, finest).step_count
    if n_steps > settings.max_steps:
        raise ConfigError(
            f"J={finest} needs {n_steps} steps to reach T={config.T}, "
            f"above max_steps={settings.max_steps}"
        )


def _evolve_projection(scheme: SchemeSpec, datum: InitialDatum, grid: GridSpec):
    op = build_step_operator(scheme, grid)
    return evolve(op, cell_average_projection(datum, grid), grid.step_count)


def _run_row(config: ExperimentConfig, scheme: SchemeSpec, datum: InitialDatum, J: int) -> ConvergenceRow:
    grid = _grid(config, J)
    row = ConvergenceRow(J=J, dx=grid.dx, dt=grid.dt, n_steps=grid.step_count)
    started = time.perf_counter()
    with logger.contextualize(J=J):
        logger.debug("▶️  Row start | J={} | dt={:.4e} | N={}", J, grid.dt, grid.step_count)
        try:
            if config.comparison is Comparison.REFINEMENT_PAIR:
                coarse = _evolve_projection(scheme, datum, grid)
                fine = _evolve_projection(scheme, datum, _grid(config, 2 * J))
                row.l2_error = convergence_error(coarse, coarsen_by_cell_average(fine), grid)
            else:
                op = build_step_operator(scheme, grid)
                initial = cell_average_projection(datum, grid)
                row.l2_error, _ = time_sampled_error(op, initial, scheme.p, grid.step_count)
        except (BlowUpError, SingularSymbolError) as exc:
            row.status, row.detail = STATUS_UNSTABLE, str(exc)
            logger.warning("⚠️  Row flagged unstable | J={} | {}", J, exc)
        row.wall_clock = time.perf_counter() - started
        logger.info(
            "✅ Row done | J={} | error={:.6g} | {:.2f}s", J, row.l2_error, row.wall_clock
        )
    return row


def _attach_orders(rows: Sequence[ConvergenceRow]) -> None:
    for previous, current in zip(rows[:-1], rows[1:]):
        if not (previous.ok and current.ok):
            continue
        try:
            current.observed_order = observed_order(
                [(previous.dx, previous.l2_error), (current.dx, current.l2_error)]
            )[0]
        except DegenerateErrorValue as exc:
            logger.warning("⚠️  No order for J={}: {}", current.J, exc)


# ─────────────────────────────────────────────────────────────────────────────
# Studies
# ─────────────────────────────────────────────────────────────────────────────
def run_convergence_study(config: ExperimentConfig, workers: Optional[int] = None) -> ConvergenceReport:
    """
    One convergence study.  Parity and stencil-order problems raise before
    any compute; a blow-up only flags its row.  Rows the closed-form CFL table
    predicts unstable (with the config's growth constant) are logged up front.
    """
    scheme = config.scheme
    datum = config.initial_datum()
    build_stencil(scheme)
    prediction = theoretical_order(datum.regularity, scheme.p, scheme.kind, scheme.theta, config.alpha)
    _check_step_budget(config)
    violations = _cfl_violations(config, scheme)
    if violations:
        logger.warning(
            "⚠️  CFL table predicts {} unstable at J={} (C={})",
            scheme.label, violations,
            settings.growth_constant if config.growth_constant is None else config.growth_constant,
        )

    workers = settings.harness_workers if workers is None else workers
    logger.info(
        "🚀 Convergence study | {} | {} | {} resolutions | {}",
        scheme.label, datum.label, len(config.J_list), config.comparison.value,
    )
    started = time.perf_counter()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_run_row, config, scheme, datum, J) for J in config.J_list]
        rows = [future.result() for future in futures]

    rows.sort(key=lambda row: row.dx, reverse=True)
    _attach_orders(rows)
    report = ConvergenceReport(scheme, datum, rows, prediction, config.echo(), violations)
    logger.info(
        "📈 Study done | final order {} | theoretical {:.3f} ({}) | {:.1f}s",
        "n/a" if report.final_order is None else f"{report.final_order:.3f}",
        report.theoretical_order, prediction.notes, time.perf_counter() - started,
    )
    return report


def sweep_datum(m: float, base: DatumConfig, seed: int) -> DatumConfig:
    """Integrated indicator when m − 1/2 is a whole number, synthetic Fourier data otherwise."""
    k = m - 0.5
    if k >= 0 and abs(k - round(k)) < 1e-12:
        params = {"k": float(round(k))}
        if base.kind.value == "indicator_integrated":
            params.update({key: v for key, v in base.params.items() if key in ("a", "b", "amplitude")})
        return DatumConfig(kind="indicator_integrated", params=params)
    return DatumConfig(kind="fourier_synthetic", params={"m": m, "seed": float(seed)})


def run_order_sweep(
    p: int,
    m_values: Sequence[float],
    base_config: ExperimentConfig,
) -> List[SweepPoint]:
    """Observed against theoretical final orders, one study per regularity m."""
    if not m_values:
        raise ConfigError("m_values must not be empty")
    upper = 4 * p + 3
    bad = [m for m in m_values if not 0 < m <= upper]
    if bad:
        raise ConfigError(f"m_values must lie in (0, {upper}] for p={p}, got {bad}")

    configs = [
        base_config.model_copy(
            update={"p": p, "m_values": None, "datum": sweep_datum(m, base_config.datum, base_config.seed)}
        )
        for m in m_values
    ]
    # Fail on parity before any study starts
    theoretical_order(m_values[0], p, configs[0].resolved_kind, base_config.theta, base_config.alpha)

    logger.info("🧭 Order sweep | p={} | m ∈ {}", p, list(m_values))
    with ThreadPoolExecutor(max_workers=max(1, settings.harness_workers)) as pool:
        futures = [pool.submit(run_convergence_study, cfg, 1) for cfg in configs]
        reports = [future.result() for future in futures]

    return [
        SweepPoint(m=m, observed=report.final_order, theoretical=report.theoretical_order, report=report)
        for m, report in zip(m_values, reports)
    ]
