"""Runtime defaults, overridable through ``MIDY_*`` environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

DEFAULT_ORACLE_BOUND = 10**4
DEFAULT_FACTOR_BUDGET = 10**7
DEFAULT_CHUNK_SIZE = 4096
DEFAULT_CHECKPOINT_EVERY = 1


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {raw!r}")
    return value


@dataclass(frozen=True)
class Settings:
    oracle_bound: int = field(default_factory=lambda: _env_int("MIDY_ORACLE_BOUND", DEFAULT_ORACLE_BOUND))
    factor_budget: int = field(default_factory=lambda: _env_int("MIDY_FACTOR_BUDGET", DEFAULT_FACTOR_BUDGET))
    jobs: int = field(default_factory=lambda: _env_int("MIDY_JOBS", os.cpu_count() or 1))
    chunk_size: int = field(default_factory=lambda: _env_int("MIDY_CHUNK_SIZE", DEFAULT_CHUNK_SIZE))
    checkpoint_every: int = field(
        default_factory=lambda: _env_int("MIDY_CHECKPOINT_EVERY", DEFAULT_CHECKPOINT_EVERY)
    )


def oracle_bound() -> int:
    return _env_int("MIDY_ORACLE_BOUND", DEFAULT_ORACLE_BOUND)


def factor_budget() -> int:
    return _env_int("MIDY_FACTOR_BUDGET", DEFAULT_FACTOR_BUDGET)
