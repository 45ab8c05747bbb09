"""
Separable ensembles read off an SSPPT factorization.

Each row C_k = [0 ... X_k, S_k,k+1 X_k, ...] of the canonical factor gives
C_k^dagger C_k = sum_j |beta_j><beta_j| (x) X_k|phi_j><phi_j|X_k, where
{phi_j} is a common eigenbasis of {S_kl}_{l>k} with eigenvalues b_j^(l) and
beta_j has 1 at position k and conj(b_j^(l)) at l > k.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.config import DEFAULT_TOLERANCES
from src.errors import NotSSPPT, ReconstructionFailed
from src.linalg.dense import ComplexMatrix, hs_norm
from src.linalg.simdiag import simultaneous_diagonalize
from src.sppt.cholesky import BlockCholeskyFactor, Side
from src.sppt.decision import Frame, is_ssppt
from src.states.bipartite import BipartiteState

log = logging.getLogger(__name__)

RECONSTRUCTION_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class EnsembleTerm:
    p: float
    a: ComplexMatrix
    b: ComplexMatrix


@dataclass(frozen=True, eq=False)
class SeparableEnsemble:
    dim_a: int
    dim_b: int
    terms: tuple[EnsembleTerm, ...]
    residual: float = 0.0

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def weight_sum(self) -> float:
        return float(sum(t.p for t in self.terms))

    def reconstruct(self) -> ComplexMatrix:
        rho = np.zeros((self.dim_a * self.dim_b,) * 2, dtype=np.complex128)
        for t in self.terms:
            rho += t.p * np.kron(t.a, t.b)
        return rho


def _row_terms(factor: BlockCholeskyFactor, k: int, tol: float) -> list[tuple[float, np.ndarray, np.ndarray]]:
    m, n = factor.n_blocks, factor.block_dim
    xk = factor.x_blocks[k]
    family = [factor.s_blocks[(k, l)] for l in range(k + 1, m)]
    phi = simultaneous_diagonalize(family, tol) if family else np.eye(n, dtype=np.complex128)
    eigenvalues = [np.diag(phi.conj().T @ s @ phi) for s in family]

    out = []
    for j in range(n):
        beta = np.zeros(m, dtype=np.complex128)
        beta[k] = 1.0
        for offset, b in enumerate(eigenvalues):
            beta[k + 1 + offset] = np.conj(b[j])
        w = xk.conj().T @ phi[:, j]
        p = float(np.vdot(beta, beta).real * np.vdot(w, w).real)
        if p < tol:
            continue
        out.append((p, beta / np.linalg.norm(beta), w / np.linalg.norm(w)))
    return out


def ensemble_from_factor(
    factor: BlockCholeskyFactor,
    dim_a: int,
    dim_b: int,
    tol: float = DEFAULT_TOLERANCES.commute,
    frame: Frame | None = None,
) -> SeparableEnsemble:
    """Product terms of every row, in row order then eigenvector order."""
    u, v = frame if frame is not None else (np.eye(dim_a), np.eye(dim_b))
    terms = []
    for k in range(factor.n_blocks):
        for p, index_vec, op_vec in _row_terms(factor, k, tol):
            if factor.side is Side.UP_TO_B:
                a_vec, b_vec = index_vec, op_vec
            else:
                a_vec, b_vec = op_vec, index_vec
            a_vec, b_vec = u @ a_vec, v @ b_vec
            terms.append(EnsembleTerm(p, np.outer(a_vec, a_vec.conj()), np.outer(b_vec, b_vec.conj())))
    return SeparableEnsemble(dim_a, dim_b, tuple(terms))


def extract_separable_ensemble(
    s: BipartiteState,
    side: Side = Side.UP_TO_B,
    tol: float = DEFAULT_TOLERANCES.commute,
    frame: Frame | None = None,
) -> SeparableEnsemble:
    side = Side.parse(side)
    report = is_ssppt(s, side, tol, frame)
    if not report:
        raise NotSSPPT(
            f"state is not SSPPT up to {side.value} (margin {report.margin:.2e}, worst triple {report.worst_triple})"
        )

    ensemble = ensemble_from_factor(report.factor, s.dim_a, s.dim_b, tol, frame)
    residual = hs_norm(ensemble.reconstruct() - s.rho)
    if residual > RECONSTRUCTION_FACTOR * tol:
        raise ReconstructionFailed(f"ensemble rebuilds the state with residual {residual:.3e}")
    log.info("extracted %d product terms up to %s, residual %.2e", len(ensemble), side.value, residual)
    return SeparableEnsemble(s.dim_a, s.dim_b, ensemble.terms, residual)
