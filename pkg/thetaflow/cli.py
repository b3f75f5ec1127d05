"""
ThetaFlow – Command Line
=========================
Thin sequential driver over the library; parallel work lives in the harness.

    python main.py run configs/airy_gaussian_run.cfg --set theta=0.5
    python main.py stability --kind backward --p 0 --theta 0 --dt 0.005 --dx 0.01
    python main.py stability --sweep
    python main.py convergence configs/advection_k1.cfg
    python main.py verify --level full

Exit codes: 0 success, 2 configuration, 3 blow-up, 4 stability
disagreement, 5 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
from loguru import logger

from thetaflow.config import settings
from thetaflow.core.exceptions import StabilityDisagreement, ThetaFlowError
from thetaflow.core.grid import GridSpec
from thetaflow.features.analysis import convergence_error
from thetaflow.features.initial_data import cell_average_projection
from thetaflow.features.reference import exact_evolve
from thetaflow.features.stencil import SchemeKind, SchemeSpec
from thetaflow.features.timestepper import build_step_operator, evolve
from thetaflow.features.vonneumann import classify_stability, stability_sweep
from thetaflow.ingestion.config_loader import load_config
from thetaflow.services import reporting
from thetaflow.services.harness import run_convergence_study, run_order_sweep
from thetaflow.services.verification import LEVELS, ensure_passed, run_verification

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)


# ─────────────────────────────────────────────────────────────────────────────
# Logging
# ─────────────────────────────────────────────────────────────────────────────
def _configure_logging(level: Optional[str] = None) -> None:
    logger.remove()
    logger.add(sys.stderr, format=LOG_FORMAT, level=level or settings.log_level)
    if settings.log_file:
        logger.add(
            settings.log_file,
            rotation=settings.log_rotation,
            retention=settings.log_retention,
            level="INFO",
        )


# ─────────────────────────────────────────────────────────────────────────────
# Commands
# ─────────────────────────────────────────────────────────────────────────────
def cmd_run(args: argparse.Namespace) -> int:
    """Single evolve at the coarsest J of the config; writes the final profile."""
    config = load_config(args.config, args.set)
    scheme = config.scheme
    datum = config.initial_datum()
    grid = GridSpec.coupled(config.domain_length, config.J_list[0], config.T, config.alpha)

    logger.info(
        "🚀 Run | {} | {} | J={} dt={:.4e} N={}",
        scheme.label, datum.label, grid.cell_count, grid.dt, grid.step_count,
    )
    initial = cell_average_projection(datum, grid)
    final = evolve(build_step_operator(scheme, grid), initial, grid.step_count)
    exact = exact_evolve(initial, grid, scheme.p, grid.time(grid.step_count))
    error = convergence_error(final, exact, grid)
    logger.info("📏 ℓ² error against the exact evolution: {:.6g}", error)

    out_dir = Path(config.output_dir)
    frame = reporting.state_frame(grid, final, exact)
    reporting.write_csv(frame, out_dir / "run_state.csv")
    reporting.plot_state(frame, out_dir / "run_state.svg", f"{scheme.label} | {datum.label} | t={config.T:g}")

    print(reporting.format_table(pd.DataFrame([
        {"scheme": scheme.label, **grid.to_dict(), "l2_error_vs_exact": error}
    ])))
    return 0


def cmd_stability(args: argparse.Namespace) -> int:
    if args.sweep:
        verdicts = stability_sweep(C=args.growth_constant, samples=args.samples)
        frame = reporting.stability_frame(verdicts)
        if args.csv:
            reporting.write_csv(frame, args.csv)
        disagreements = frame[~frame["agrees"]]
        print(f"{len(frame)} cases, {len(disagreements)} disagreements")
        if len(disagreements):
            print(reporting.format_table(disagreements))
            raise StabilityDisagreement(f"{len(disagreements)} sweep cases disagree with the table")
        return 0

    scheme = SchemeSpec(SchemeKind(args.kind), args.p, args.theta)
    verdict = classify_stability(scheme, args.dt, args.dx, args.growth_constant, args.samples)
    print(reporting.format_table(pd.DataFrame([{
        "scheme": scheme.label,
        "dt": args.dt,
        "dx": args.dx,
        "max|A|": verdict.max_magnitude,
        "bound": verdict.profile.bound,
        "sampled": verdict.verdict.value,
        "table": verdict.predicted.value,
    }])))
    if verdict.profile.reason:
        print(verdict.profile.reason)
    if not verdict.agrees:
        raise StabilityDisagreement(
            f"sampled verdict '{verdict.verdict.value}' but table predicts '{verdict.predicted.value}'"
        )
    return 0


def cmd_convergence(args: argparse.Namespace) -> int:
    config = load_config(args.config, args.set)
    out_dir = Path(config.output_dir)

    if config.m_values:
        points = run_order_sweep(config.p, config.m_values, config)
        reporting.write_sweep_report(points, out_dir, config.p)
        print(reporting.format_table(reporting.sweep_frame(points)))
        return 0

    report = run_convergence_study(config)
    reporting.write_convergence_report(report, out_dir)
    frame = reporting.convergence_frame(report)
    frame["wall_clock_s"] = [row.wall_clock for row in report.rows]
    print(f"{report.scheme.label} | {report.datum.label} | {report.prediction.notes}")
    print(reporting.format_table(frame))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_verification(args.level)
    print(reporting.format_table(pd.DataFrame([r.to_dict() for r in results])))
    ensure_passed(results)
    return 0


# ─────────────────────────────────────────────────────────────────────────────
# Parser
# ─────────────────────────────────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thetaflow",
        description="θ-schemes for ∂ₜu + ∂ₓ^(2p+1)u = 0: stability, runs and convergence studies.",
    )
    parser.add_argument(
        "--log-level", default=None, type=str.upper, help="Override THETAFLOW_LOG_LEVEL (e.g. DEBUG)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Evolve one resolution and write the final profile")
    run.add_argument("config")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    run.set_defaults(handler=cmd_run)

    stab = sub.add_parser("stability", help="Sampled von Neumann verdict against the closed-form table")
    stab.add_argument("--kind", choices=[k.value for k in SchemeKind])
    stab.add_argument("--p", type=int)
    stab.add_argument("--theta", type=float)
    stab.add_argument("--dt", type=float)
    stab.add_argument("--dx", type=float)
    stab.add_argument("--samples", type=int, default=None)
    stab.add_argument("--growth-constant", type=float, default=None)
    stab.add_argument("--sweep", action="store_true", help="Run the full parameter cross-check")
    stab.add_argument("--csv", default=None, help="Write the sweep table to this file")
    stab.set_defaults(handler=cmd_stability)

    conv = sub.add_parser("convergence", help="Convergence study or regularity sweep")
    conv.add_argument("config")
    conv.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    conv.set_defaults(handler=cmd_convergence)

    ver = sub.add_parser("verify", help="Run the identity suite")
    ver.add_argument("--level", choices=LEVELS, default="fast")
    ver.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "stability" and not args.sweep:
        missing = [name for name in ("kind", "p", "theta", "dt", "dx") if getattr(args, name) is None]
        if missing:
            parser.error(f"stability needs --{', --'.join(missing)} (or --sweep)")

    _configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ThetaFlowError as exc:
        code = exc.exit_code if exc.exit_code != 1 else (2 if isinstance(exc, ValueError) else 1)
        logger.error("❌ {}", exc)
        return code
    except ValueError as exc:
        logger.error("❌ invalid input: {}", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
