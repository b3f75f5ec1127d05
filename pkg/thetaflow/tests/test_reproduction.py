"""
tests/test_reproduction.py
===========================
Observed orders of the shipped study configs on rough integrated-indicator
data.  These are the long-running tests (J up to 102400, well under two
minutes each).

Run with:
    pytest thetaflow/tests/test_reproduction.py -v
"""

from pathlib import Path

import pytest

from thetaflow.ingestion.config_loader import load_config
from thetaflow.services.harness import run_convergence_study

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


def _study(name):
    report = run_convergence_study(load_config(CONFIG_DIR / name))
    assert not report.unstable_rows
    return report


# ─────────────────────────────────────────────────────────────────────────────
# m = 3/2
# ─────────────────────────────────────────────────────────────────────────────

def test_advection_three_halves():
    report = _study("advection_k1.cfg")
    assert report.theoretical_order == 0.75
    assert 0.67 <= report.final_order <= 0.83


def test_airy_three_halves():
    report = _study("airy_k1.cfg")
    assert report.theoretical_order == 0.25
    assert 0.15 <= report.final_order <= 0.38


def test_fifth_order_three_halves():
    report = _study("fifth_order_k1.cfg")
    assert report.theoretical_order == 0.15
    assert 0.10 <= report.mean_order(last=3) <= 0.25


# ─────────────────────────────────────────────────────────────────────────────
# m = 5/2
# ─────────────────────────────────────────────────────────────────────────────

def test_advection_five_halves():
    report = _study("advection_k2.cfg")
    assert report.theoretical_order == 1.0
    assert 0.95 <= report.final_order <= 1.05


def test_airy_five_halves():
    report = _study("airy_k2.cfg")
    assert round(report.theoretical_order, 3) == 0.417
    assert 0.35 <= report.final_order <= 0.60


def test_fifth_order_five_halves():
    report = _study("fifth_order_k2.cfg")
    assert report.theoretical_order == 0.25
    assert 0.18 <= report.mean_order(last=3) <= 0.32


@pytest.mark.parametrize("name", ["airy_crank_nicolson_exact.cfg"])
def test_crank_nicolson_smooth_data(name):
    """Smooth data under central Crank–Nicolson: second order in dx."""
    report = _study(name)
    assert report.theoretical_order == 2.0
    assert report.final_order == pytest.approx(2.0, abs=0.3)
