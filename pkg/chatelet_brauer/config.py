"""
config.py — Environment-driven run configuration for chatelet-brauer.

Every setting has a default, so the reference sweeps at p = 2, 31, 43 and 67
run without any exports.

Env var convention:
    CHATELET_PRECISION  — p-adic working precision in digits
    CHATELET_GUARD      — guard digits below which results are unreadable
    CHATELET_SEED       — seed for the Hilbert 90 base-element search
    CHATELET_D          — degree of the unramified extension (0 picks e·f)
    CHATELET_JOBS       — sweep worker threads
    CHATELET_EMBEDDING  — group element fixing the embedding of K in the tower
    CHATELET_FORMAT     — "table" | "json-lines"
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field, ValidationInfo, field_validator

from .errors import UsageError


def _env(name: str, default: str) -> str:
    return os.getenv(name) or default


def _env_int(name: str, default: str) -> int:
    value = _env(f"CHATELET_{name}", default)
    try:
        return int(value)
    except ValueError as exc:
        raise UsageError(f"CHATELET_{name} must be an integer, got {value!r}") from exc


# Keys accepted in a config file, spelled like the CLI flags.
_FILE_KEYS = {
    "a": "a",
    "c": "c",
    "P": "P",
    "m": "m",
    "p": "p",
    "precision": "precision",
    "guard": "guard",
    "d": "d",
    "seed": "seed",
    "jobs": "jobs",
    "format": "output_format",
    "points": "points",
    "base": "base",
    "bound": "bound",
    "embedding": "embedding",
}


class RunConfig(BaseModel):
    """
    Settings shared by the CLI subcommands and the local invariant pipeline.

    Reads defaults from environment variables:
        CHATELET_PRECISION
        CHATELET_GUARD
        CHATELET_SEED
        CHATELET_D
        CHATELET_JOBS
        CHATELET_EMBEDDING
        CHATELET_FORMAT
    """

    precision: int = Field(default_factory=lambda: _env_int("PRECISION", "24"))
    guard: int = Field(default_factory=lambda: _env_int("GUARD", "6"))
    seed: int = Field(default_factory=lambda: _env_int("SEED", "0"))
    d: int = Field(default_factory=lambda: _env_int("D", "0"))
    jobs: int = Field(default_factory=lambda: _env_int("JOBS", "1"))
    embedding: int = Field(default_factory=lambda: _env_int("EMBEDDING", "0"))
    output_format: str = Field(default_factory=lambda: _env("CHATELET_FORMAT", "table"))

    # Surface and point selection; unset fields are filled per subcommand.
    a: Optional[str] = None
    c: Optional[str] = None
    P: Optional[str] = None
    m: Optional[int] = None
    p: Optional[int] = None
    points: Optional[str] = None     # "x,y;x,y;..."
    base: Optional[str] = None       # "x,y"
    bound: int = 20

    @field_validator("precision")
    @classmethod
    def validate_precision(cls, v: int) -> int:
        if v < 8 or v > 10_000:
            raise ValueError("precision must be between 8 and 10000 digits")
        return v

    @field_validator("guard")
    @classmethod
    def validate_guard(cls, v: int, info: ValidationInfo) -> int:
        precision = info.data.get("precision")
        if v < 1 or (precision is not None and 2 * v > precision):
            raise ValueError(f"guard must be between 1 and precision/2, got {v}")
        return v

    @field_validator("d")
    @classmethod
    def validate_d(cls, v: int) -> int:
        if v < 0 or v > 64:
            raise ValueError("d must be 0 (automatic) or between 1 and 64")
        return v

    @field_validator("jobs")
    @classmethod
    def validate_jobs(cls, v: int) -> int:
        if v < 1 or v > 64:
            raise ValueError("jobs must be between 1 and 64")
        return v

    @field_validator("embedding")
    @classmethod
    def validate_embedding(cls, v: int) -> int:
        if v < 0:
            raise ValueError("embedding must name a group element, got a negative index")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_format(cls, v: str) -> str:
        allowed = {"table", "json-lines"}
        if v not in allowed:
            raise ValueError(f"format must be one of {sorted(allowed)}, got '{v}'")
        return v

    @field_validator("bound")
    @classmethod
    def validate_bound(cls, v: int) -> int:
        if v < 0 or v > 10_000:
            raise ValueError("bound must be between 0 and 10000")
        return v

    @property
    def digits(self) -> int:
        """Digits a reported value must survive: precision minus guard."""
        return self.precision - self.guard

    @classmethod
    def from_file(cls, path: str | Path, **overrides: Any) -> "RunConfig":
        """
        Load `key=value` lines (flag names, `#` comments) and apply overrides.

        Overrides set to None count as "flag not given" and leave the file
        value in place.
        """
        values: dict[str, Any] = {}
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lstrip("-").replace("-", "_")
            if not sep or key not in _FILE_KEYS:
                raise UsageError(f"{path}:{lineno}: expected key=value with a known key")
            values[_FILE_KEYS[key]] = value.strip()
        for key, value in overrides.items():
            if value is not None:
                values[_FILE_KEYS.get(key, key)] = value
        return cls(**values)


__all__ = ["RunConfig"]
