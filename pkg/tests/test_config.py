"""
test_config.py — Tests for RunConfig.

Covers:
  - Defaults and environment overrides
  - Sanity bounds on precision, guard, d, jobs and format
  - key=value config files with flag overrides

Run with:
    pytest tests/test_config.py -v
"""

from __future__ import annotations

import pytest
from pydantic import ValidationError

from chatelet_brauer.config import RunConfig
from chatelet_brauer.errors import UsageError


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("PRECISION", "GUARD", "SEED", "D", "JOBS", "FORMAT", "EMBEDDING"):
        monkeypatch.delenv(f"CHATELET_{name}", raising=False)


class TestDefaults:
    def test_defaults(self):
        config = RunConfig()
        assert (config.precision, config.guard, config.seed, config.d) == (24, 6, 0, 0)
        assert config.jobs == 1
        assert config.embedding == 0
        assert config.output_format == "table"
        assert config.digits == 18

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("CHATELET_PRECISION", "40")
        monkeypatch.setenv("CHATELET_FORMAT", "json-lines")
        config = RunConfig()
        assert config.precision == 40
        assert config.output_format == "json-lines"

    def test_unprefixed_env_ignored(self, monkeypatch):
        monkeypatch.setenv("CB_SEED", "9")
        assert RunConfig().seed == 0

    def test_empty_env_uses_default(self, monkeypatch):
        monkeypatch.setenv("CHATELET_SEED", "")
        assert RunConfig().seed == 0

    def test_non_integer_env(self, monkeypatch):
        monkeypatch.setenv("CHATELET_JOBS", "many")
        with pytest.raises(UsageError, match="CHATELET_JOBS"):
            RunConfig()


class TestBounds:
    @pytest.mark.parametrize(
        "field, value",
        [
            ("precision", 4),
            ("precision", 10_001),
            ("d", 65),
            ("d", -1),
            ("jobs", 0),
            ("output_format", "csv"),
            ("bound", -1),
            ("embedding", -2),
        ],
    )
    def test_rejected(self, field: str, value):
        with pytest.raises(ValidationError):
            RunConfig(**{field: value})

    def test_guard_at_most_half_precision(self):
        with pytest.raises(ValidationError, match="guard"):
            RunConfig(precision=10, guard=6)

    def test_accepted_extremes(self):
        config = RunConfig(precision=10_000, d=64, jobs=64)
        assert config.d == 64


class TestConfigFile:
    def test_file_values(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# X_22 at 2\nm = 22\np=2\nprecision=32\nformat=json-lines\n")
        config = RunConfig.from_file(path)
        assert (config.m, config.p, config.precision) == (22, 2, 32)
        assert config.output_format == "json-lines"

    def test_flags_win(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("seed=1\n--points=1,10;2,15\n")
        config = RunConfig.from_file(path, seed=5, points=None)
        assert config.seed == 5
        assert config.points == "1,10;2,15"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("colour=blue\n")
        with pytest.raises(UsageError, match="run.cfg:1"):
            RunConfig.from_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(UsageError, match="cannot read"):
            RunConfig.from_file(tmp_path / "absent.cfg")
