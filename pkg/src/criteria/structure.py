"""
Decision procedures for structural classes of bipartite states.

CQ structure is decided through the blocks A_ij = (I (x) <i'|) rho (I (x) |j'>):
rho is classical-quantum iff these form a commuting normal family, in which
case their common eigenbasis is the classical basis. Every B-side predicate
is the A-side one applied to the factor-swapped state.
"""

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from src.config import DEFAULT_TOLERANCES
from src.errors import ReconstructionFailed
from src.linalg.dense import (
    ComplexMatrix,
    commutator_norm,
    herm_eig,
    herm_spectrum,
    hs_norm,
    trace_norm,
)
from src.linalg.simdiag import SIMDIAG_SEED, family_violation, simultaneous_diagonalize
from src.states.bipartite import (
    BipartiteState,
    block_a,
    partial_trace_a,
    partial_trace_b,
    partial_transpose_a,
    swap_factors,
    swap_matrix,
)

log = logging.getLogger(__name__)

ZERO_WEIGHT = 1e-12
PAIR_SHORT_CIRCUIT_DIM = 16


@dataclass(frozen=True)
class Verdict:
    holds: bool
    residual: float
    tol: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class PptResult:
    is_ppt: bool
    min_eigenvalue: float
    tol: float

    @property
    def residual(self) -> float:
        return max(0.0, -self.min_eigenvalue)

    def __bool__(self) -> bool:
        return self.is_ppt


@dataclass(frozen=True, eq=False)
class CqWitness:
    is_cq: bool
    max_violation: float
    tol: float
    side: str = "A"
    basis: ComplexMatrix | None = None
    weights: np.ndarray | None = None
    sigmas: tuple[ComplexMatrix, ...] = ()
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.is_cq

    def reconstruct(self) -> ComplexMatrix:
        """Rebuild sum_k p_k |k><k| (x) sigma_k in the state's own A-major order."""
        if self.basis is None or self.weights is None:
            raise ReconstructionFailed("witness carries no decomposition")
        rho = sum(
            p * np.kron(np.outer(u, u.conj()), sigma)
            for p, u, sigma in zip(self.weights, self.basis.T, self.sigmas)
        )
        if self.side == "B":
            return swap_matrix(rho, self.basis.shape[0], self.sigmas[0].shape[0])
        return rho


@dataclass(frozen=True, eq=False)
class EigenspaceDecomposition:
    values: tuple[float, ...]
    bases: tuple[ComplexMatrix, ...]

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.bases)


@dataclass(frozen=True, eq=False)
class ZeroMinWitness:
    is_zero_min: bool
    cq: CqWitness
    tol: float
    max_distance: float = 0.0
    min_weight_gap: float = float("inf")
    violating_pair: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.is_zero_min

    @property
    def margin(self) -> float:
        """Worst residual relative to its tolerance; <= 1 iff the predicate holds."""
        if not self.cq:
            return self.cq.max_violation / self.cq.tol
        return max(self.cq.max_violation / self.cq.tol, self.max_distance / self.tol)


def is_ppt(s: BipartiteState, tol: float = DEFAULT_TOLERANCES.positivity) -> PptResult:
    lowest = float(herm_spectrum(partial_transpose_a(s))[0])
    return PptResult(lowest >= -tol, lowest, tol)


def conditional_states(
    s: BipartiteState, basis: ComplexMatrix
) -> tuple[np.ndarray, tuple[ComplexMatrix, ...]]:
    """Weights p_k = Tr rho(|k><k| (x) I) and normalized conditional states on H_B."""
    u = np.kron(basis, np.eye(s.dim_b))
    rotated = (u.conj().T @ s.rho @ u).reshape(s.dim_a, s.dim_b, s.dim_a, s.dim_b)
    weights = np.empty(s.dim_a)
    sigmas = []
    for k in range(s.dim_a):
        block = rotated[k, :, k, :]
        weights[k] = max(np.trace(block).real, 0.0)
        if weights[k] > ZERO_WEIGHT:
            sigmas.append((block + block.conj().T) / (2 * weights[k]))
        else:
            sigmas.append(np.eye(s.dim_b, dtype=np.complex128) / s.dim_b)
    return weights, tuple(sigmas)


def is_cq(
    s: BipartiteState,
    tol: float = DEFAULT_TOLERANCES.commute,
    seed: int = SIMDIAG_SEED,
) -> CqWitness:
    blocks = [block_a(s, i, j) for i in range(s.dim_b) for j in range(i, s.dim_b)]
    stop = tol if s.dim_b > PAIR_SHORT_CIRCUIT_DIM else None
    violation = family_violation(blocks, stop_above=stop)
    if violation > tol:
        return CqWitness(False, violation, tol)

    basis = simultaneous_diagonalize(blocks, tol, seed)
    weights, sigmas = conditional_states(s, basis)
    witness = CqWitness(True, violation, tol, "A", basis, weights, sigmas)
    residual = hs_norm(witness.reconstruct() - s.rho)
    if residual > 10 * tol:
        raise ReconstructionFailed(
            f"blocks commute within {violation:.2e} but rebuild error is {residual:.2e}"
        )
    return CqWitness(True, violation, tol, "A", basis, weights, sigmas, residual)


def is_qc(
    s: BipartiteState,
    tol: float = DEFAULT_TOLERANCES.commute,
    seed: int = SIMDIAG_SEED,
) -> CqWitness:
    w = is_cq(swap_factors(s), tol, seed)
    return CqWitness(w.is_cq, w.max_violation, w.tol, "B", w.basis, w.weights, w.sigmas, w.residual)


def marginal_commutator_a(s: BipartiteState) -> float:
    marginal = np.kron(partial_trace_b(s), np.eye(s.dim_b))
    return commutator_norm(s.rho, marginal)


def marginal_commutes_a(s: BipartiteState, tol: float = DEFAULT_TOLERANCES.commute) -> bool:
    return marginal_commutator_a(s) <= tol


def marginal_commutes_b(s: BipartiteState, tol: float = DEFAULT_TOLERANCES.commute) -> bool:
    return marginal_commutator_a(swap_factors(s)) <= tol


def eigenspace_decomposition(
    m: ComplexMatrix,
    gap_tol: float = DEFAULT_TOLERANCES.weight_gap,
) -> EigenspaceDecomposition:
    eig = herm_eig(m)
    n = eig.values.size
    scale = max(float(np.max(np.abs(eig.values))), 1e-300) if n else 1.0
    values, bases = [], []
    start = 0
    for stop in range(1, n + 1):
        if stop < n and eig.values[stop] - eig.values[stop - 1] <= gap_tol * scale:
            continue
        values.append(float(np.mean(eig.values[start:stop])))
        bases.append(eig.vectors[:, start:stop])
        start = stop
    return EigenspaceDecomposition(tuple(values), tuple(bases))


def cluster_weights(weights: np.ndarray, gap_tol: float) -> list[list[int]]:
    """Group indices of (near-)equal weights; zero weights are left out."""
    order = [int(k) for k in np.argsort(weights, kind="stable") if weights[k] > ZERO_WEIGHT]
    if not order:
        return []
    scale = float(weights[order[-1]])
    clusters = [[order[0]]]
    for prev, k in zip(order, order[1:]):
        if weights[k] - weights[prev] <= gap_tol * scale:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    return clusters


def is_zero_min_a(
    s: BipartiteState,
    tol: float = DEFAULT_TOLERANCES.commute,
    gap_tol: float = DEFAULT_TOLERANCES.weight_gap,
) -> ZeroMinWitness:
    """
    Zero measurement-induced nonlocality on A: rho is CQ and, within every
    group of equal weights, the conditional states coincide.
    """
    cq = is_cq(s, tol)
    if not cq:
        return ZeroMinWitness(False, cq, tol)

    clusters = cluster_weights(cq.weights, gap_tol)
    means = [float(np.mean(cq.weights[c])) for c in clusters]
    min_gap = min((b - a for a, b in zip(means, means[1:])), default=float("inf"))

    worst, pair = 0.0, None
    for cluster in clusters:
        for k, l in combinations(sorted(cluster), 2):
            distance = trace_norm(cq.sigmas[k] - cq.sigmas[l])
            if distance > worst:
                worst, pair = distance, (k, l)

    holds = worst <= tol
    log.debug("zero-MiN check: %d weight clusters, max distance %.3e", len(clusters), worst)
    return ZeroMinWitness(holds, cq, tol, worst, min_gap, None if holds else pair)


def is_zero_min_b(
    s: BipartiteState,
    tol: float = DEFAULT_TOLERANCES.commute,
    gap_tol: float = DEFAULT_TOLERANCES.weight_gap,
) -> ZeroMinWitness:
    w = is_zero_min_a(swap_factors(s), tol, gap_tol)
    cq = w.cq
    mirrored = CqWitness(cq.is_cq, cq.max_violation, cq.tol, "B", cq.basis, cq.weights, cq.sigmas, cq.residual)
    return ZeroMinWitness(w.is_zero_min, mirrored, w.tol, w.max_distance, w.min_weight_gap, w.violating_pair)


def product_residual(s: BipartiteState) -> float:
    return hs_norm(s.rho - np.kron(partial_trace_b(s), partial_trace_a(s)))


def is_product(s: BipartiteState, tol: float = DEFAULT_TOLERANCES.commute) -> Verdict:
    residual = product_residual(s)
    return Verdict(residual <= tol, residual, tol)
