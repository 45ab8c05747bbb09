"""
Measurement-induced nonlocality (MiN), geometric discord (GMQD) and
entropic discord.

MiN maximizes the disturbance ||rho - Pi(rho)||_2^2 over measurements that
leave rho_A invariant, i.e. bases made of eigenvectors of rho_A. GMQD
minimizes the same disturbance over all bases of A. Discord minimizes the
conditional entropy left on B after measuring A. B-side variants run the
A-side code on the factor-swapped state.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.linalg import block_diag

from src.config import DEFAULT_SEED, DEFAULT_TOLERANCES, Tolerances
from src.criteria.structure import ZERO_WEIGHT, eigenspace_decomposition, is_cq, is_zero_min_a
from src.errors import UnsupportedDimension
from src.linalg.dense import ComplexMatrix, herm_eig, random_unitary
from src.measures.entropy import conditional_entropy_after, von_neumann_entropy
from src.measures.measurement import Measurement, disturbance, outcome_ensemble
from src.measures.optimizer import (
    SweepOutcome,
    all_pairs,
    best_outcome,
    block_pairs,
    bloch_search,
    multistart,
)
from src.states.bipartite import (
    BipartiteState,
    PureState,
    partial_trace_a,
    partial_trace_b,
    swap_factors,
)

log = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-8
MAX_DISCORD_DIM = 3


class Certificate(str, Enum):
    EXACT = "Exact"
    BOUND = "Bound"


@dataclass(frozen=True)
class MeasureOptions:
    seed: int = DEFAULT_SEED
    restarts: int = 16
    sweep_tol: float = 1e-10
    grid: int = 64
    workers: int = 1
    tol: Tolerances = DEFAULT_TOLERANCES


@dataclass(frozen=True, eq=False)
class MeasureResult:
    name: str
    value: float
    optimizer: Measurement
    certificate: Certificate
    raw_value: float | None = None
    iterations: int = 0
    seed: int | None = None
    restarts_agreeing: int = 1
    side: str = "A"
    classical_correlation: float | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "side": self.side,
            "value": self.value,
            "raw_value": self.value if self.raw_value is None else self.raw_value,
            "certificate": self.certificate.value,
            "iterations": self.iterations,
            "seed": self.seed,
            "restarts_agreeing": self.restarts_agreeing,
        }
        if self.classical_correlation is not None:
            out["classical_correlation"] = self.classical_correlation
        return out


def _mirror(result: MeasureResult) -> MeasureResult:
    return replace(result, side="B")


def _agreeing(outcomes: list[SweepOutcome], best: SweepOutcome) -> int:
    return sum(1 for o in outcomes if abs(o.value - best.value) <= AGREEMENT_TOL)


def _eigenbasis(m: ComplexMatrix) -> ComplexMatrix:
    return herm_eig(m).vectors


def min_a(s: BipartiteState, opts: MeasureOptions = MeasureOptions()) -> MeasureResult:
    tol = opts.tol
    zero = is_zero_min_a(s, tol.commute, tol.weight_gap)
    if zero:
        basis = zero.cq.basis
        return MeasureResult("min", disturbance(s.rho, basis, s.dim_b), Measurement(basis), Certificate.EXACT)

    decomposition = eigenspace_decomposition(partial_trace_b(s), tol.weight_gap)
    eigenbasis = np.hstack(decomposition.bases)
    clusters, offset = [], 0
    for value, base in zip(decomposition.values, decomposition.bases):
        size = base.shape[1]
        if size > 1 and value > ZERO_WEIGHT:
            clusters.append(list(range(offset, offset + size)))
        offset += size

    if not clusters:
        value = disturbance(s.rho, eigenbasis, s.dim_b)
        return MeasureResult("min", value, Measurement(eigenbasis), Certificate.EXACT)

    def start(index: int, rng: np.random.Generator) -> ComplexMatrix:
        if index == 0:
            return eigenbasis
        blocks, position = [], 0
        for c in clusters:
            blocks.extend([np.eye(1)] * (c[0] - position))
            blocks.append(random_unitary(len(c), rng))
            position = c[-1] + 1
        blocks.extend([np.eye(1)] * (s.dim_a - position))
        return eigenbasis @ block_diag(*blocks)

    outcomes = multistart(
        lambda u: -disturbance(s.rho, u, s.dim_b),
        start,
        block_pairs(clusters),
        opts.restarts,
        opts.seed,
        opts.sweep_tol,
        opts.workers,
    )
    best = best_outcome(outcomes)
    log.debug("MiN over %d degenerate eigenspaces: %.6g", len(clusters), -best.value)
    return MeasureResult(
        "min",
        -best.value,
        Measurement(best.basis),
        Certificate.BOUND,
        iterations=sum(o.sweeps for o in outcomes),
        seed=opts.seed,
        restarts_agreeing=_agreeing(outcomes, best),
    )


def min_b(s: BipartiteState, opts: MeasureOptions = MeasureOptions()) -> MeasureResult:
    return _mirror(min_a(swap_factors(s), opts))


def min_pure(p: PureState) -> float:
    lam = np.asarray(p.schmidt, dtype=float)
    return float(1.0 - np.sum(lam**4))


def _minimize_over_bases(
    s: BipartiteState,
    objective,
    opts: MeasureOptions,
) -> tuple[float, ComplexMatrix, int, int]:
    eigenbasis = _eigenbasis(partial_trace_b(s))

    def start(index: int, rng: np.random.Generator) -> ComplexMatrix:
        return eigenbasis if index == 0 else random_unitary(s.dim_a, rng)

    outcomes = multistart(
        objective, start, all_pairs(s.dim_a), opts.restarts, opts.seed, opts.sweep_tol, opts.workers
    )
    best = best_outcome(outcomes)
    value, basis = best.value, best.basis
    iterations = sum(o.sweeps for o in outcomes)
    if s.dim_a == 2 and opts.grid > 0:
        grid_value, grid_basis, nit = bloch_search(objective, opts.grid)
        iterations += nit
        if grid_value < value:
            value, basis = grid_value, grid_basis
    return value, basis, iterations, _agreeing(outcomes, best)


def gmqd_a(s: BipartiteState, opts: MeasureOptions = MeasureOptions()) -> MeasureResult:
    cq = is_cq(s, opts.tol.commute)
    if cq:
        return MeasureResult("gmqd", disturbance(s.rho, cq.basis, s.dim_b), Measurement(cq.basis), Certificate.EXACT)

    value, basis, iterations, agreeing = _minimize_over_bases(
        s, lambda u: disturbance(s.rho, u, s.dim_b), opts
    )
    return MeasureResult(
        "gmqd",
        value,
        Measurement(basis),
        Certificate.BOUND,
        iterations=iterations,
        seed=opts.seed,
        restarts_agreeing=agreeing,
    )


def gmqd_b(s: BipartiteState, opts: MeasureOptions = MeasureOptions()) -> MeasureResult:
    return _mirror(gmqd_a(swap_factors(s), opts))


def measured_conditional_entropy(s: BipartiteState, m: Measurement) -> float:
    weights, states = outcome_ensemble(s, m)
    return conditional_entropy_after(weights, states)


def classical_correlation(s: BipartiteState, m: Measurement) -> float:
    """S(rho_B) - sum_k p_k S(rho_k) for the measurement m on A."""
    return von_neumann_entropy(partial_trace_a(s)) - measured_conditional_entropy(s, m)


def discord_a(s: BipartiteState, opts: MeasureOptions = MeasureOptions()) -> MeasureResult:
    if s.dim_a > MAX_DISCORD_DIM:
        raise UnsupportedDimension(f"discord is supported for a measured factor of at most {MAX_DISCORD_DIM} levels")

    offset = von_neumann_entropy(partial_trace_b(s)) - von_neumann_entropy(s.rho)
    entropy_b = von_neumann_entropy(partial_trace_a(s))
    cq = is_cq(s, opts.tol.commute)
    if cq:
        conditional = measured_conditional_entropy(s, Measurement(cq.basis))
        raw = offset + conditional
        return MeasureResult(
            "discord",
            max(raw, 0.0),
            Measurement(cq.basis),
            Certificate.EXACT,
            raw_value=raw,
            classical_correlation=entropy_b - conditional,
        )

    value, basis, iterations, agreeing = _minimize_over_bases(
        s, lambda u: measured_conditional_entropy(s, Measurement(u)), opts
    )
    raw = offset + value
    if raw < -1e-9:
        log.warning("discord optimizer returned %.3e below zero", raw)
    return MeasureResult(
        "discord",
        max(raw, 0.0),
        Measurement(basis),
        Certificate.BOUND,
        raw_value=raw,
        iterations=iterations,
        seed=opts.seed,
        restarts_agreeing=agreeing,
        classical_correlation=entropy_b - value,
    )


def discord_b(s: BipartiteState, opts: MeasureOptions = MeasureOptions()) -> MeasureResult:
    return _mirror(discord_a(swap_factors(s), opts))


MEASURES = {
    "min-a": min_a,
    "min-b": min_b,
    "gmqd-a": gmqd_a,
    "gmqd-b": gmqd_b,
    "discord-a": discord_a,
    "discord-b": discord_b,
}
