"""
tests/test_vonneumann.py
=========================
Amplification factors, symbols and the stability classifier against the
closed-form table.

Run with:
    pytest thetaflow/tests/ -v
"""

import math

import numpy as np
import pytest

from thetaflow.core.exceptions import SingularSymbolError
from thetaflow.features.stencil import SchemeKind, SchemeSpec
from thetaflow.features.vonneumann import (
    Verdict,
    amplification,
    amplification_profile,
    classify_stability,
    max_stable_dt,
    stability_sweep,
    symbol_closed_form,
    symbol_sum,
    table_prediction,
    unstable_parity,
)

F, B, C = SchemeKind.FORWARD, SchemeKind.BACKWARD, SchemeKind.CENTRAL


# ─────────────────────────────────────────────────────────────────────────────
# Symbols
# ─────────────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("p", range(5))
def test_symbol_closed_form(p):
    """The binomial sum equals e^{−iπξ}(−2i sin πξ)^(2p+1)."""
    xi = np.linspace(0.0, 1.0, 1024)
    np.testing.assert_allclose(symbol_sum(p, xi), symbol_closed_form(p, xi), rtol=0, atol=1e-10)


def test_symbol_sum_advection_at_half():
    assert symbol_sum(0, 0.5) == pytest.approx(-2.0)


def test_amplification_at_unit_ratio():
    """Explicit forward advection with dt = dx: A(1/2) = 3, A(0) = 1."""
    scheme = SchemeSpec(F, 0, 0.0)
    assert abs(amplification(scheme, 1.0, 1.0, 0.5)) == pytest.approx(3.0)
    assert amplification(scheme, 1.0, 1.0, 0.0) == pytest.approx(1.0)


def test_amplification_rejects_out_of_range_xi():
    with pytest.raises(ValueError):
        amplification(SchemeSpec(B, 0, 1.0), 0.1, 0.1, 1.5)


@pytest.mark.parametrize("p", range(4))
def test_central_crank_nicolson_is_unitary(p):
    profile = amplification_profile(SchemeSpec(C, p, 0.5), 0.3, 0.1)
    np.testing.assert_allclose(profile.magnitudes, 1.0, atol=1e-12)


def test_one_sided_crank_nicolson_is_dissipative_on_stable_parity():
    """θ = 1/2 keeps |A| ≤ 1 for backward advection and forward Airy."""
    for scheme in (SchemeSpec(B, 0, 0.5), SchemeSpec(F, 1, 0.5)):
        profile = amplification_profile(scheme, 0.05, 0.1)
        assert profile.max_magnitude <= 1.0 + 1e-12


def test_profile_needs_enough_samples():
    with pytest.raises(ValueError):
        amplification_profile(SchemeSpec(B, 0, 1.0), 0.1, 0.1, samples=100)


# ─────────────────────────────────────────────────────────────────────────────
# Singular denominators
# ─────────────────────────────────────────────────────────────────────────────

def test_singular_denominator_raises_with_frequency():
    """Forward advection, θ = 1/2, dt = dx: 1 + θλσ vanishes at ξ = 1/2."""
    scheme = SchemeSpec(F, 0, 0.5)
    with pytest.raises(SingularSymbolError, match="singular symbol"):
        amplification(scheme, 1.0, 1.0, 0.5)


def test_singular_samples_make_profile_unstable():
    scheme = SchemeSpec(F, 0, 0.5)
    verdict = classify_stability(scheme, 1.0, 1.0, samples=1025)
    assert verdict.profile.reason
    assert verdict.verdict is Verdict.UNSTABLE
    assert verdict.agrees


# ─────────────────────────────────────────────────────────────────────────────
# Classifier examples
# ─────────────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize(
    "scheme, dt, dx, expected",
    [
        (SchemeSpec(B, 0, 0.0), 0.005, 0.01, Verdict.STABLE),
        (SchemeSpec(F, 0, 0.0), 0.005, 0.01, Verdict.UNSTABLE),
        (SchemeSpec(C, 1, 1.0), 1.0, 0.01, Verdict.STABLE),
        (SchemeSpec(C, 1, 1.0), 1e-9, 0.01, Verdict.STABLE),
        (SchemeSpec(F, 1, 1.0), 10.0, 0.01, Verdict.STABLE),
        (SchemeSpec(B, 1, 1.0), 1e-6, 0.01, Verdict.UNSTABLE),
        (SchemeSpec(F, 2, 1.0), 1e-10, 0.01, Verdict.UNSTABLE),
    ],
)
def test_classifier_examples(scheme, dt, dx, expected):
    verdict = classify_stability(scheme, dt, dx)
    assert verdict.verdict is expected
    assert verdict.predicted is expected


def test_explicit_backward_advection_cfl():
    """Stable while dt ≤ dx, unstable beyond."""
    scheme = SchemeSpec(B, 0, 0.0)
    assert classify_stability(scheme, 0.01, 0.01).verdict is Verdict.STABLE
    assert classify_stability(scheme, 0.02, 0.01).verdict is Verdict.UNSTABLE


def test_verdict_serializes():
    data = classify_stability(SchemeSpec(B, 0, 1.0), 0.01, 0.01).to_dict()
    assert data["sampled"] == "stable"
    assert data["agrees"] is True


# ─────────────────────────────────────────────────────────────────────────────
# Closed-form table
# ─────────────────────────────────────────────────────────────────────────────

def test_unstable_parity():
    assert unstable_parity(F, 2) and unstable_parity(F, 4)
    assert not unstable_parity(F, 0) and not unstable_parity(F, 1)
    assert unstable_parity(B, 1) and unstable_parity(B, 3)
    assert not unstable_parity(B, 0) and not unstable_parity(B, 2)
    assert not any(unstable_parity(C, p) for p in range(5))


def test_table_prediction_crank_nicolson_forward_advection():
    """dt(1−2θ) = 0 is not ≤ −dx."""
    assert table_prediction(SchemeSpec(F, 0, 0.5), 0.01, 0.01) is Verdict.UNSTABLE
    assert table_prediction(SchemeSpec(B, 0, 0.5), 0.01, 0.01) is Verdict.STABLE


def test_max_stable_dt():
    dx = 0.01
    assert max_stable_dt(SchemeSpec(B, 0, 0.0), dx) == pytest.approx(dx)
    assert max_stable_dt(SchemeSpec(B, 0, 0.25), dx) == pytest.approx(2 * dx)
    assert max_stable_dt(SchemeSpec(F, 0, 0.0), dx) is None
    assert max_stable_dt(SchemeSpec(F, 0, 0.5), dx) is None
    assert max_stable_dt(SchemeSpec(F, 0, 1.0), dx) == math.inf
    assert max_stable_dt(SchemeSpec(C, 1, 1.0), dx) == math.inf
    assert max_stable_dt(SchemeSpec(F, 1, 0.0), dx) == pytest.approx(dx**3 / 4)
    assert max_stable_dt(SchemeSpec(F, 2, 1.0), dx) is None


def test_stability_sweep_agrees_everywhere():
    """θ × p × kind × mesh ratio: 180 cases, zero disagreements."""
    results = stability_sweep()
    assert len(results) == 180
    disagreements = [r.to_dict() for r in results if not r.agrees]
    assert disagreements == []
