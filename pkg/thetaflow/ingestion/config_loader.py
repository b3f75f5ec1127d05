"""
ThetaFlow – Config File Ingestion
==================================
Reads the flat ``key = value`` experiment files:

    # Table-2 style advection study
    p             = 0
    kind          = backward
    theta         = 1
    J_list        = 800, 1600, 3200
    datum.kind    = indicator_integrated
    datum.params  = k:1, a:20, b:25
    comparison    = refinement_pair

Blank lines and ``#`` comments are skipped.  Unknown or repeated keys, and
anything the ExperimentConfig schema rejects, raise ConfigError.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, List, Optional

from loguru import logger
from pydantic import ValidationError

from thetaflow.core.exceptions import ConfigError
from thetaflow.schemas.experiment import ExperimentConfig

KNOWN_KEYS = (
    "p", "kind", "theta", "domain_length", "T", "J_list", "alpha",
    "datum.kind", "datum.params", "comparison", "output_dir", "seed",
    "m_values", "growth_constant",
)
LIST_KEYS = {"J_list", "m_values"}


# ─────────────────────────────────────────────────────────────────────────────
# Parsing helpers
# ─────────────────────────────────────────────────────────────────────────────
def _split_list(raw: str) -> List[str]:
    return [item.strip() for item in raw.replace(";", ",").split(",") if item.strip()]


def _parse_params(raw: str, where: str) -> Dict[str, str]:
    params: Dict[str, str] = {}
    for item in _split_list(raw):
        name, sep, value = item.partition(":")
        if not sep:
            name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ConfigError(f"{where}: malformed datum parameter '{item}' (expected name:value)")
        params[name.strip()] = value.strip()
    return params


def parse_lines(lines: Iterable[str], source: str = "<config>") -> Dict[str, str]:
    """Raw ``key → value`` mapping; validates key names and duplicates."""
    entries: Dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        key, value = key.strip(), value.strip()
        where = f"{source}:{lineno}"
        if not sep or not key:
            raise ConfigError(f"{where}: expected 'key = value', got '{line.rstrip()}'")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{where}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        entries[key] = value
    return entries


def _structure(entries: Dict[str, str], source: str) -> dict:
    data: dict = {}
    datum: dict = {}
    for key, value in entries.items():
        if key == "datum.kind":
            datum["kind"] = value
        elif key == "datum.params":
            datum["params"] = _parse_params(value, source)
        elif key in LIST_KEYS:
            data[key] = _split_list(value)
        else:
            data[key] = value
    if datum:
        data["datum"] = datum
    return data


def build_config(entries: Dict[str, str], source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(_structure(entries, source))
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"{source}: {problems}") from exc


# ─────────────────────────────────────────────────────────────────────────────
# Public API
# ─────────────────────────────────────────────────────────────────────────────
def load_config(path: str | Path, overrides: Optional[Iterable[str]] = None) -> ExperimentConfig:
    """
    Parse a config file, apply ``key=value`` overrides, validate.

    Usage::

        config = load_config("configs/advection_k1.cfg", ["theta=0.5"])
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    logger.info("📂 Loading experiment config: {}", path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc

    entries = parse_lines(text.splitlines(), str(path))
    if overrides:
        override_entries = parse_lines(overrides, "--set")
        entries.update(override_entries)
        logger.debug("Overrides applied: {}", override_entries)
    return build_config(entries, str(path))
