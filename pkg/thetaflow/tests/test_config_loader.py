"""
tests/test_config_loader.py
============================
Parsing and validation of ``key = value`` experiment files.

Run with:
    pytest thetaflow/tests/ -v
"""

from pathlib import Path

import pytest

from thetaflow.core.exceptions import ConfigError
from thetaflow.features.initial_data import DatumKind
from thetaflow.features.stencil import SchemeKind
from thetaflow.ingestion.config_loader import load_config, parse_lines
from thetaflow.schemas.experiment import DEFAULT_J_LIST, Comparison

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"

VALID = """
# advection study
p             = 0
kind          = backward
theta         = 1
T             = 0.1
J_list        = 800, 1600, 3200
datum.kind    = indicator_integrated
datum.params  = k:1, a:20, b:25
comparison    = refinement_pair
"""


def _write(tmp_path, text, name="study.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# ─────────────────────────────────────────────────────────────────────────────
# Valid files
# ─────────────────────────────────────────────────────────────────────────────

def test_valid_file(tmp_path):
    config = load_config(_write(tmp_path, VALID))
    assert config.p == 0
    assert config.scheme.kind is SchemeKind.BACKWARD
    assert config.J_list == [800, 1600, 3200]
    assert config.datum.kind is DatumKind.INDICATOR_INTEGRATED
    assert config.datum.params == {"k": 1.0, "a": 20.0, "b": 25.0}
    assert config.comparison is Comparison.REFINEMENT_PAIR
    assert config.initial_datum().regularity == 1.5


def test_defaults(tmp_path):
    config = load_config(_write(tmp_path, "p = 1\n"))
    assert config.J_list == DEFAULT_J_LIST
    assert config.domain_length == 50.0
    assert config.resolved_kind is SchemeKind.FORWARD
    assert config.theta == 1.0


def test_auto_kind_follows_parity(tmp_path):
    assert load_config(_write(tmp_path, "p = 2\nkind = auto\n")).resolved_kind is SchemeKind.BACKWARD
    assert load_config(_write(tmp_path, "p = 3\n")).resolved_kind is SchemeKind.FORWARD


def test_inline_comments_and_blank_lines(tmp_path):
    config = load_config(_write(tmp_path, "\n\np = 1   # Airy\n\ntheta = 0.5 # CN\n"))
    assert config.p == 1 and config.theta == 0.5


def test_alternate_spellings(tmp_path):
    text = "comparison = ExactReference\ndatum.kind = FourierSynthetic\ndatum.params = m=1.2; seed=4\nJ_list = 64, 128\n"
    config = load_config(_write(tmp_path, text))
    assert config.comparison is Comparison.EXACT_REFERENCE
    assert config.datum.kind is DatumKind.FOURIER_SYNTHETIC
    assert config.datum.params == {"m": 1.2, "seed": 4.0}


def test_overrides_win(tmp_path):
    config = load_config(_write(tmp_path, VALID), ["theta=0.5", "J_list=100,200"])
    assert config.theta == 0.5
    assert config.J_list == [100, 200]


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.cfg")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    config = load_config(path)
    assert config.output_dir.startswith("results/")


# ─────────────────────────────────────────────────────────────────────────────
# Rejections
# ─────────────────────────────────────────────────────────────────────────────

def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.cfg")


@pytest.mark.parametrize(
    "text, message",
    [
        ("p = 0\nthetta = 1\n", "unknown key 'thetta'"),
        ("p = 0\np = 1\n", "duplicate key 'p'"),
        ("p 0\n", "expected 'key = value'"),
        ("datum.params = k\n", "malformed datum parameter"),
    ],
)
def test_line_errors(tmp_path, text, message):
    with pytest.raises(ConfigError, match=message):
        load_config(_write(tmp_path, text))


def test_error_names_the_line():
    with pytest.raises(ConfigError, match="demo.cfg:3"):
        parse_lines(["p = 0", "# ok", "bogus = 1"], "demo.cfg")


@pytest.mark.parametrize(
    "text",
    [
        "J_list = 800, 400\n",
        "J_list = 2\n",
        "J_list = \n",
        "J_list = 801, 1602\n",
        "theta = 1.5\n",
        "p = -1\n",
        "kind = sideways\n",
        "alpha = 0\n",
        "m_values = 1.5, -1\n",
        "datum.kind = gaussian\ndatum.params = k:1\n",
        "datum.kind = sawtooth\n",
    ],
)
def test_schema_rejections(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, text))


def test_odd_cells_allowed_for_exact_reference(tmp_path):
    config = load_config(_write(tmp_path, "comparison = exact_reference\nJ_list = 63, 127\n"))
    assert config.J_list == [63, 127]


def test_bad_override_rejected(tmp_path):
    with pytest.raises(ConfigError, match="--set"):
        load_config(_write(tmp_path, VALID), ["colour=blue"])
