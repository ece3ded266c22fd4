"""Configuration system for process-level settings.

Scenario physics (room, access points, users) is configured per run through the
scenario documents in :mod:`owc_alloc.scenarios.schema`; this module only holds
the knobs that govern how a run executes.
"""

from enum import Enum
from pathlib import Path
from typing import Optional, Tuple

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class ExecutionBackend(str, Enum):
    """Execution backend for channel tracing tasks."""

    SERIAL = "serial"
    THREADS = "threads"


class LdLayout(str, Enum):
    """Placement of the laser diodes inside one access point."""

    COLOCATED = "colocated"
    GRID = "grid"


class ObjectiveMode(str, Enum):
    """Allocation objective."""

    SUM_LINEAR = "linear"
    SUM_DB = "db"


VALID_ORDERS = ("los", "first", "second")


def parse_orders(value: str) -> Tuple[str, ...]:
    """Parse a comma separated list of reflection orders."""
    orders = tuple(part.strip().lower() for part in value.split(",") if part.strip())
    unknown = [order for order in orders if order not in VALID_ORDERS]
    if unknown or not orders:
        raise ValueError(
            f"orders must be a non-empty comma list of {', '.join(VALID_ORDERS)}, got {value!r}"
        )
    # canonical order, duplicates dropped
    return tuple(order for order in VALID_ORDERS if order in orders)


class Settings(BaseSettings):
    """Process settings with environment variable support."""

    # Output configuration
    output_dir: Path = Path("./results")

    # Execution configuration
    execution_backend: ExecutionBackend = ExecutionBackend.SERIAL
    threads: int = Field(default=1, ge=1)

    # Ray tracing configuration
    bin_width_s: float = Field(default=1e-11, gt=0)
    fine_element_m: float = Field(default=0.05, gt=0)
    coarse_element_m: float = Field(default=0.20, gt=0)
    orders: str = "los,first,second"

    # Allocation configuration
    objective: ObjectiveMode = ObjectiveMode.SUM_LINEAR

    # Logging configuration
    log_level: str = "INFO"
    log_json: bool = False

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="OWC_ALLOC_",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("orders")
    @classmethod
    def _check_orders(cls, value: str) -> str:
        return ",".join(parse_orders(value))

    @property
    def order_tuple(self) -> Tuple[str, ...]:
        return parse_orders(self.orders)


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
