"""
Simultaneous diagonalization of commuting normal families.

Every member is split into Hermitian parts (M + M^dagger)/2 and
(M - M^dagger)/2i. A seeded random real combination of all parts is
diagonalized; eigenvalue clusters that are not already scalar for every part
are split again with a fresh combination.
"""

import logging
from typing import Sequence

import numpy as np

from src.errors import NoConvergence, NotCommutingFamily, ShapeMismatch
from src.linalg.dense import (
    ComplexMatrix,
    as_matrix,
    commutator_norm,
    herm_eig,
    hermitian_part,
    hs_norm,
    normality_residual,
)

log = logging.getLogger(__name__)

SIMDIAG_SEED = 1729
MAX_ATTEMPTS = 8
CLUSTER_GAP = 1e-6


def family_violation(family: Sequence[ComplexMatrix], stop_above: float | None = None) -> float:
    """
    Largest normalized normality/commutator residual over a family.

    Pairs are checked both as [A, B] and [A, B^dagger]; each commutator is
    divided by max(1, ||A|| ||B||). With `stop_above` set the scan returns as
    soon as one residual exceeds it.
    """
    mats = [as_matrix(m) for m in family]
    worst = 0.0
    for m in mats:
        worst = max(worst, normality_residual(m))
        if stop_above is not None and worst > stop_above:
            return worst
    for i, a in enumerate(mats):
        for b in mats[i + 1 :]:
            scale = max(1.0, hs_norm(a) * hs_norm(b))
            worst = max(
                worst,
                commutator_norm(a, b) / scale,
                commutator_norm(a, b.conj().T) / scale,
            )
            if stop_above is not None and worst > stop_above:
                return worst
    return worst


def _parts(mats: list[ComplexMatrix]) -> list[ComplexMatrix]:
    parts = []
    for m in mats:
        parts.append(hermitian_part(m))
        parts.append((m - m.conj().T) / 2j)
    return parts


def _is_scalar(block: ComplexMatrix, tol: float, scale: float) -> bool:
    k = block.shape[0]
    mean = np.trace(block) / k
    return hs_norm(block - mean * np.eye(k)) <= tol * max(1.0, scale)


def _split(
    parts: list[ComplexMatrix],
    basis: ComplexMatrix,
    rng: np.random.Generator,
    tol: float,
    depth: int,
) -> ComplexMatrix:
    m = basis.shape[1]
    if m == 1:
        return basis

    restricted = [basis.conj().T @ p @ basis for p in parts]
    if all(_is_scalar(r, tol, hs_norm(p)) for r, p in zip(restricted, parts)):
        return basis
    if depth > basis.shape[0] + 2:
        raise NoConvergence("degenerate cluster could not be resolved")

    coeffs = rng.standard_normal(len(restricted))
    combo = sum(c * r for c, r in zip(coeffs, restricted))
    eig = herm_eig(hermitian_part(combo), tol=1e-6)
    gap = CLUSTER_GAP * max(float(np.max(np.abs(eig.values))), 1e-300)

    columns = []
    start = 0
    for stop in range(1, m + 1):
        if stop < m and eig.values[stop] - eig.values[stop - 1] <= gap:
            continue
        sub = basis @ eig.vectors[:, start:stop]
        if stop - start > 1:
            sub = _split(parts, sub, rng, tol, depth + 1)
        columns.append(sub)
        start = stop
    return np.hstack(columns)


def off_diagonal_residual(u: ComplexMatrix, m: ComplexMatrix) -> float:
    d = u.conj().T @ m @ u
    return hs_norm(d - np.diag(np.diag(d))) / max(1.0, hs_norm(m))


def simultaneous_diagonalize(
    family: Sequence[ComplexMatrix],
    tol: float = 1e-8,
    seed: int = SIMDIAG_SEED,
) -> ComplexMatrix:
    """
    Unitary U with U^dagger M U diagonal (within tol) for every M in family.

    Deterministic for a fixed seed. Raises NotCommutingFamily when the family
    is not a commuting normal family and NoConvergence when no random
    combination resolves it within the retry budget.
    """
    mats = [as_matrix(m) for m in family]
    if not mats:
        raise ShapeMismatch("cannot diagonalize an empty family")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ShapeMismatch(f"family members must all be {n}x{n}, got {m.shape}")

    violation = family_violation(mats)
    if violation > tol:
        raise NotCommutingFamily(f"family violates commutation by {violation:.3e}")

    parts = _parts(mats)
    rng = np.random.default_rng(seed)
    worst = np.inf
    for attempt in range(MAX_ATTEMPTS):
        u = _split(parts, np.eye(n, dtype=np.complex128), rng, tol, 0)
        worst = max(off_diagonal_residual(u, m) for m in mats)
        if worst <= tol:
            return u
        log.debug("simultaneous diagonalization attempt %d left residual %.3e", attempt, worst)

    raise NoConvergence(f"off-diagonal residual {worst:.3e} after {MAX_ATTEMPTS} attempts")
