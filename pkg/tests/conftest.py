from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest


ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.states.bipartite import BipartiteState, new_bipartite  # noqa: E402
from src.states.families import make_werner  # noqa: E402


@pytest.fixture
def bell() -> BipartiteState:
    phi = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
    return new_bipartite(np.outer(phi, phi.conj()), 2, 2)


@pytest.fixture
def werner():
    return make_werner


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
