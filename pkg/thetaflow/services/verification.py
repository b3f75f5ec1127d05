"""
ThetaFlow – Identity Suite
===========================
Named property checks behind ``python main.py verify``.  Each check returns
(passed, detail); the suite stops nowhere, the caller decides what a failure
means.  ``full`` adds the dense-solver oracle comparisons.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
from loguru import logger

from thetaflow.core.exceptions import VerificationError
from thetaflow.core.grid import FieldState, GridSpec, l2_discrete_norm, parseval_check
from thetaflow.features import stencil
from thetaflow.features.reference import exact_evolve
from thetaflow.features.stencil import SchemeKind, SchemeSpec
from thetaflow.features.timestepper import build_step_operator, direct_step, step
from thetaflow.features.vonneumann import stability_sweep, symbol_closed_form, symbol_sum

LEVELS = ("fast", "full")
SUITE_SEED = 20240601

CheckOutcome = Tuple[bool, str]


@dataclass(frozen=True)
class CheckResult:
    name:    str
    passed:  bool
    detail:  str
    seconds: float

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "result": "pass" if self.passed else "FAIL",
            "detail": self.detail,
            "seconds": self.seconds,
        }


def _random_state(J: int, seed: int = SUITE_SEED) -> FieldState:
    return FieldState(np.random.default_rng(seed + J).standard_normal(J))


# ─────────────────────────────────────────────────────────────────────────────
# Checks
# ─────────────────────────────────────────────────────────────────────────────
def check_lemma1() -> CheckOutcome:
    """
    lemma1_lhs is 0 below 2p+1 and (2p+1)! at 2p+1; every stencil's moments
    agree with it, and the implied ξ beyond 2p+1 lies in (−p, p+1).
    """
    for p in range(5):
        q = 2 * p + 1
        for l in range(3 * q + 1):
            value = stencil.lemma1_lhs(p, l)
            if l <= q and value != (math.factorial(q) if l == q else 0):
                return False, f"lemma1_lhs({p}, {l}) = {value:g}"
            xi = stencil.moment_witness(p, l)
            if xi is not None and not -p < xi < p + 1:
                return False, f"p={p}, l={l}: implied ξ={xi:.6g} outside ({-p}, {p + 1})"
        for kind in SchemeKind:
            weights = stencil.build_stencil(SchemeSpec(kind, p, 1.0))
            for l in range(q + 1):
                if weights.moment(l) != stencil.lemma1_lhs(p, l):
                    return False, f"{kind.value} p={p}: moment {l} is {weights.moment(l)}"
        forward = stencil.build_stencil(SchemeSpec(SchemeKind.FORWARD, p, 1.0))
        for l in range(q + 1, 3 * q + 1):
            if float(forward.moment(l)) != stencil.lemma1_lhs(p, l):
                return False, f"forward p={p}: moment {l} is {forward.moment(l)}"
    return True, "p ≤ 4, l ≤ 3(2p+1), exact"


def check_symbol_identity() -> CheckOutcome:
    xi = np.linspace(0.0, 1.0, 1024)
    worst = 0.0
    for p in range(5):
        closed = symbol_closed_form(p, xi)
        scale = max(1.0, float(np.max(np.abs(closed))))
        worst = max(worst, float(np.max(np.abs(symbol_sum(p, xi) - closed))) / scale)
    return worst <= 1e-10, f"max relative gap {worst:.2e}"


def check_parseval() -> CheckOutcome:
    worst = 0.0
    for J in (64, 63, 1024):
        grid = GridSpec(50.0, J, 0.01, 0.1)
        state = _random_state(J)
        worst = max(worst, parseval_check(state, grid) / l2_discrete_norm(state, grid) ** 2)
    return worst <= 1e-10, f"max relative gap {worst:.2e}"


def check_unitarity() -> CheckOutcome:
    worst = 0.0
    for J in (64, 63):
        grid = GridSpec(50.0, J, 0.01, 1.0)
        state = _random_state(J)
        norm = l2_discrete_norm(state, grid)
        for p in range(4):
            evolved = exact_evolve(state, grid, p, 0.7)
            worst = max(worst, abs(l2_discrete_norm(evolved, grid) - norm) / norm)
    return worst <= 1e-12, f"max relative drift {worst:.2e}"


def check_cn_norm() -> CheckOutcome:
    """Central Crank–Nicolson conserves the ℓ²_Δ norm step by step."""
    worst = 0.0
    grid = GridSpec(64.0, 64, 0.5, 10.0)
    state = _random_state(64)
    for p in range(4):
        op = build_step_operator(SchemeSpec(SchemeKind.CENTRAL, p, 0.5), grid)
        current = state
        for _ in range(10):
            nxt = step(op, current)
            before = l2_discrete_norm(current, grid)
            worst = max(worst, abs(l2_discrete_norm(nxt, grid) - before) / before)
            current = nxt
    return worst <= 1e-10, f"max per-step drift {worst:.2e}"


def check_mass() -> CheckOutcome:
    """Every scheme keeps the mean of the field."""
    grid = GridSpec(64.0, 64, 0.05, 1.0)
    state = _random_state(64)
    worst = 0.0
    for kind in SchemeKind:
        for p in range(3):
            for theta in (0.0, 0.5, 1.0):
                nxt = step(build_step_operator(SchemeSpec(kind, p, theta), grid), state)
                worst = max(worst, abs(nxt.values.mean() - state.values.mean()))
    return worst <= 1e-12, f"max mean drift {worst:.2e}"


def check_stability_table() -> CheckOutcome:
    verdicts = stability_sweep()
    bad = [v for v in verdicts if not v.agrees]
    if bad:
        first = bad[0].profile
        return False, f"{len(bad)} disagreements, first {first.scheme.label} dt={first.dt:.3e}"
    return True, f"{len(verdicts)} cases agree"


def check_dense_oracle() -> CheckOutcome:
    """Fourier stepping against a dense solve on J = 32 and 64."""
    worst = 0.0
    for J in (32, 64):
        grid = GridSpec(float(J), J, 0.05, 1.0)
        state = _random_state(J)
        for kind in SchemeKind:
            for p in range(3):
                for theta in (0.0, 0.5, 1.0):
                    scheme = SchemeSpec(kind, p, theta)
                    fourier = step(build_step_operator(scheme, grid), state).values
                    dense = direct_step(scheme, grid, state).values
                    worst = max(worst, float(np.linalg.norm(fourier - dense) / np.linalg.norm(dense)))
    return worst <= 1e-9, f"max relative difference {worst:.2e}"


FAST_CHECKS: Dict[str, Callable[[], CheckOutcome]] = {
    "lemma1": check_lemma1,
    "symbol_identity": check_symbol_identity,
    "parseval": check_parseval,
    "unitarity": check_unitarity,
    "cn_norm": check_cn_norm,
    "mass": check_mass,
    "stability_table": check_stability_table,
}
FULL_CHECKS: Dict[str, Callable[[], CheckOutcome]] = {**FAST_CHECKS, "dense_oracle": check_dense_oracle}


# ─────────────────────────────────────────────────────────────────────────────
# Runner
# ─────────────────────────────────────────────────────────────────────────────
def run_verification(level: str = "fast") -> List[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got '{level}'")
    checks = FULL_CHECKS if level == "full" else FAST_CHECKS
    results = []
    for name, check in checks.items():
        started = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, passed, detail, time.perf_counter() - started))
        log = logger.info if passed else logger.error
        log("{} {} | {}", "✅" if passed else "❌", name, detail)
    return results


def ensure_passed(results: List[CheckResult]) -> None:
    """Raise VerificationError naming the first failing check."""
    for result in results:
        if not result.passed:
            raise VerificationError(result.name, result.detail)
