"""Named state families for the `gen` command and the test batteries."""

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from src.errors import BadNormalization, UnknownFamily
from src.linalg.dense import random_unitary
from src.sppt.generator import make_ssppt_random
from src.states.bipartite import BipartiteState
from src.states.families import (
    make_circulant,
    make_example1,
    make_example3,
    make_pure_schmidt,
    make_werner,
    random_cq,
    random_product,
    random_qc,
    random_state,
)

EXAMPLE3_DEFAULTS = {"a": 0.2, "b": 0.1, "c": 0.15, "d": 0.2, "e": 0.1, "f": 0.05, "g": 0.05}


@dataclass
class FamilyParams:
    dim_a: int = 2
    dim_b: int = 2
    seed: int = 0
    side: str = "B"
    rank: int | None = None
    p: float = 0.5
    schmidt: list[float] = field(default_factory=lambda: [1.0])
    values: dict[str, Any] = field(default_factory=dict)


def _commuting_example1(params: FamilyParams) -> BipartiteState:
    """rho11, D and T diagonal in one random basis of C^n."""
    rng = np.random.default_rng(params.seed)
    n = params.dim_b
    w = random_unitary(n, rng)
    rho11 = (w * rng.uniform(0.2, 1.0, n)) @ w.conj().T
    d = (w * (rng.uniform(0.0, 1.0, n) * np.exp(2j * np.pi * rng.uniform(size=n)))) @ w.conj().T
    t = (w * (rng.uniform(0.0, 1.0, n) * np.exp(2j * np.pi * rng.uniform(size=n)))) @ w.conj().T
    return make_example1(rho11, d, t)


def _example3(params: FamilyParams) -> BipartiteState:
    v = {**EXAMPLE3_DEFAULTS, **params.values}
    return make_example3(
        float(v["a"]), float(v["b"]), float(v["c"]), float(v["d"]),
        complex(v["e"]), complex(v["f"]), complex(v["g"]),
    )


def _circulant(params: FamilyParams) -> BipartiteState:
    v = params.values
    return make_circulant(
        float(v.get("a11", 0.25)),
        float(v.get("a22", 0.25)),
        float(v.get("b11", 0.25)),
        float(v.get("b22", 0.25)),
        complex(v.get("a12", 0.0)),
        complex(v.get("b12", 0.0)),
    )


def _pure_schmidt(params: FamilyParams) -> BipartiteState:
    lam = np.asarray(params.schmidt, dtype=float)
    norm = np.linalg.norm(lam)
    if norm == 0:
        raise BadNormalization("Schmidt coefficients are all zero")
    return make_pure_schmidt(lam / norm).density()


def _ssppt_random(params: FamilyParams) -> BipartiteState:
    return make_ssppt_random(params.dim_a, params.dim_b, params.side, params.seed)


FAMILIES: dict[str, Callable[[FamilyParams], BipartiteState]] = {
    "product": lambda q: random_product(q.dim_a, q.dim_b, q.seed),
    "cq": lambda q: random_cq(q.dim_a, q.dim_b, q.seed),
    "qc": lambda q: random_qc(q.dim_a, q.dim_b, q.seed),
    "circulant": _circulant,
    "example1": _commuting_example1,
    "example3": _example3,
    "pure-schmidt": _pure_schmidt,
    "random": lambda q: random_state(q.dim_a, q.dim_b, q.rank, q.seed),
    "ssppt-random": _ssppt_random,
    "werner": lambda q: make_werner(q.p),
}


def generate(family: str, params: FamilyParams | None = None) -> BipartiteState:
    key = family.strip().lower()
    if key not in FAMILIES:
        raise UnknownFamily(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    return FAMILIES[key](params or FamilyParams())
