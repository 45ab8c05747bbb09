"""
Coordinate descent over measurement bases.

A basis U is refined by right-multiplying pairwise rotations: for each
allowed index pair (i, j) the rotation angle is optimized once along the
real generator and once along the imaginary one. Sweeps repeat until the
objective moves by less than `sweep_tol`. Restarts are independent and
seeded from one SeedSequence, so results do not depend on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from src.linalg.dense import ComplexMatrix, random_unitary

log = logging.getLogger(__name__)

Objective = Callable[[ComplexMatrix], float]

ANGLE_XATOL = 1e-10
MAX_SWEEPS = 200
PHASES = (0.0, np.pi / 2)


@dataclass(frozen=True, eq=False)
class SweepOutcome:
    value: float
    basis: ComplexMatrix
    sweeps: int
    restart: int


def givens(theta: float, phi: float, dim: int, i: int, j: int) -> ComplexMatrix:
    g = np.eye(dim, dtype=np.complex128)
    c, s = np.cos(theta), np.sin(theta) * np.exp(1j * phi)
    g[i, i] = c
    g[j, j] = c
    g[i, j] = -np.conj(s)
    g[j, i] = s
    return g


def all_pairs(dim: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(dim) for j in range(i + 1, dim)]


def block_pairs(blocks: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Index pairs that stay inside one block."""
    return [(b[x], b[y]) for b in blocks for x in range(len(b)) for y in range(x + 1, len(b))]


def sweep_descent(
    objective: Objective,
    basis: ComplexMatrix,
    pairs: Sequence[tuple[int, int]],
    sweep_tol: float = 1e-10,
    max_sweeps: int = MAX_SWEEPS,
) -> tuple[float, ComplexMatrix, int]:
    u = np.array(basis, dtype=np.complex128, copy=True)
    dim = u.shape[0]
    value = objective(u)
    if not pairs:
        return value, u, 0

    for sweep in range(1, max_sweeps + 1):
        start = value
        for i, j in pairs:
            for phi in PHASES:
                res = minimize_scalar(
                    lambda t: objective(u @ givens(t, phi, dim, i, j)),
                    bounds=(-np.pi / 2, np.pi / 2),
                    method="bounded",
                    options={"xatol": ANGLE_XATOL},
                )
                if res.fun < value:
                    u = u @ givens(float(res.x), phi, dim, i, j)
                    value = float(res.fun)
        if start - value < sweep_tol:
            return value, u, sweep
    log.debug("sweep descent stopped after %d sweeps at %.3e", max_sweeps, value)
    return value, u, max_sweeps


def multistart(
    objective: Objective,
    starts: Callable[[int, np.random.Generator], ComplexMatrix],
    pairs: Sequence[tuple[int, int]],
    restarts: int,
    seed: int,
    sweep_tol: float = 1e-10,
    workers: int = 1,
) -> list[SweepOutcome]:
    """Run `restarts` independent descents; outcomes are returned in restart order."""
    children = np.random.SeedSequence(seed).spawn(restarts)

    def run(index: int) -> SweepOutcome:
        rng = np.random.default_rng(children[index])
        value, u, sweeps = sweep_descent(objective, starts(index, rng), pairs, sweep_tol)
        return SweepOutcome(value, u, sweeps, index)

    if workers > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(run, range(restarts)))
    return [run(k) for k in range(restarts)]


def best_outcome(outcomes: Sequence[SweepOutcome]) -> SweepOutcome:
    """Lowest value, ties going to the earlier restart."""
    return min(outcomes, key=lambda o: (o.value, o.restart))


def random_start(dim: int) -> Callable[[int, np.random.Generator], ComplexMatrix]:
    def start(index: int, rng: np.random.Generator) -> ComplexMatrix:
        if index == 0:
            return np.eye(dim, dtype=np.complex128)
        return random_unitary(dim, rng)

    return start


def bloch_basis(theta: float, phi: float) -> ComplexMatrix:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    return np.array([[c, -np.conj(e) * s], [e * s, c]], dtype=np.complex128)


def bloch_search(objective: Objective, grid: int = 64) -> tuple[float, ComplexMatrix, int]:
    """Dense (theta, phi) grid over qubit bases, then Nelder-Mead from the best node."""
    thetas = np.linspace(0.0, np.pi, grid)
    phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    best = (np.inf, 0.0, 0.0)
    for theta in thetas:
        for phi in phis:
            v = objective(bloch_basis(theta, phi))
            if v < best[0]:
                best = (v, theta, phi)

    res = minimize(
        lambda x: objective(bloch_basis(x[0], x[1])),
        x0=np.array(best[1:]),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
    )
    if res.fun < best[0]:
        return float(res.fun), bloch_basis(*res.x), int(res.nit)
    return float(best[0]), bloch_basis(best[1], best[2]), int(res.nit)
