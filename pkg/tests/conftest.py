"""
Shared pytest fixtures for chatelet-brauer tests.
"""

from __future__ import annotations

import pytest

from chatelet_brauer import chatelet, gcoh, localinv, numfield, padic
from chatelet_brauer.chatelet import family_spec
from chatelet_brauer.config import RunConfig
from chatelet_brauer.models import SurfaceSpec


@pytest.fixture(autouse=True)
def _reset_caches():
    """Ensure every test starts and ends with empty memo tables."""
    for module in (gcoh, numfield, chatelet, padic, localinv):
        module.clear_caches()
    yield
    for module in (gcoh, numfield, chatelet, padic, localinv):
        module.clear_caches()


@pytest.fixture
def x22() -> SurfaceSpec:
    """x² + y² = −(t⁴ − 22)."""
    return family_spec(22)


@pytest.fixture
def low_precision() -> RunConfig:
    """Enough digits for p = 2 towers while keeping tests quick."""
    return RunConfig(precision=16, guard=4, seed=0, d=0, jobs=1, embedding=0)
