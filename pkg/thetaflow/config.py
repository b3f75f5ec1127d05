"""
ThetaFlow – Central Configuration
==================================
Runtime settings are loaded from environment variables (prefix ``THETAFLOW_``)
or a ``.env`` file next to the package.
Every value is validated at import time; a bad THETAFLOW_* variable fails fast.
"""

from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

PACKAGE_DIR = Path(__file__).resolve().parent

_LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


# ─────────────────────────────────────────────────────────────────────────────
class AppSettings(BaseSettings):
    """Numerical limits, harness sizing and log sinks."""

    model_config = SettingsConfigDict(
        env_prefix="THETAFLOW_",
        env_file=PACKAGE_DIR / ".env",
        case_sensitive=False,
        extra="ignore",
    )

    # ── Stencils ─────────────────────────────────────────────────────────────
    p_max: int = Field(6, ge=0, le=12, description="Largest derivative parameter p accepted")

    # ── Stability ────────────────────────────────────────────────────────────
    xi_samples: int = Field(4096, ge=512, description="Uniform ξ samples on [0, 1], endpoints included")
    growth_constant: float = Field(1.0, ge=0.0, description="C in the bound max|A| ≤ 1 + C·dt")

    # ── Time stepping ────────────────────────────────────────────────────────
    blowup_factor: float = Field(1e12, gt=1.0, description="Norm growth treated as blow-up")
    max_steps: int = Field(1_000_000, ge=1, description="Upper bound on the step count N")
    time_samples: int = Field(1024, ge=1, description="Time levels sampled for the sup-in-time error")

    # ── Initial data ─────────────────────────────────────────────────────────
    fourier_mode_cap: int = Field(2**18, ge=16, description="Highest mode of Fourier-synthetic data")

    # ── Harness ──────────────────────────────────────────────────────────────
    harness_workers: int = Field(4, ge=1, description="Thread pool size for rows and sweep points")
    output_dir: str = Field("results", description="Default directory for CSV/SVG artifacts")

    # ── Logging (Loguru sinks) ───────────────────────────────────────────────
    log_level: str = Field("INFO", description="Console sink level")
    log_file: str = Field("", description="Rotating log file; empty disables the file sink")
    log_rotation: str = Field("10 MB")
    log_retention: str = Field("7 days")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, level: str) -> str:
        level = level.strip().upper()
        if level not in _LOG_LEVELS:
            raise ValueError(f"log_level {level!r} is not one of {', '.join(_LOG_LEVELS)}")
        return level

    @field_validator("log_file", mode="before")
    @classmethod
    def _anchor_log_file(cls, path: str) -> str:
        # relative paths live under the package; parent dirs are created here
        if not path:
            return ""
        resolved = Path(path) if Path(path).is_absolute() else (PACKAGE_DIR / path).resolve()
        resolved.parent.mkdir(parents=True, exist_ok=True)
        return str(resolved)


@lru_cache(maxsize=1)
def get_settings() -> AppSettings:
    """Cached settings instance."""
    return AppSettings()


settings: AppSettings = get_settings()
