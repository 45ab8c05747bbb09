"""
Local von Neumann measurements.

A measurement is an orthonormal basis of one factor; its projectors are
the rank-one projectors onto the basis columns.
"""

from dataclasses import dataclass

import numpy as np

from src.criteria.structure import conditional_states
from src.errors import NotOrthonormal, ShapeMismatch
from src.linalg.dense import ComplexMatrix, as_matrix, hs_norm
from src.measures.optimizer import bloch_basis
from src.states.bipartite import BipartiteState, new_bipartite, swap_factors, swap_matrix

UNITARITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Measurement:
    basis: ComplexMatrix

    def __post_init__(self) -> None:
        u = as_matrix(self.basis)
        if u.shape[0] != u.shape[1]:
            raise ShapeMismatch(f"measurement basis has shape {u.shape}")
        if hs_norm(u.conj().T @ u - np.eye(u.shape[0])) > UNITARITY_TOL:
            raise NotOrthonormal("measurement basis is not unitary")
        object.__setattr__(self, "basis", u)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projectors(self) -> list[ComplexMatrix]:
        return [np.outer(u, u.conj()) for u in self.basis.T]

    @classmethod
    def computational(cls, dim: int) -> "Measurement":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "Measurement":
        """Qubit basis {|n>, |-n>} for the Bloch direction (theta, phi)."""
        return cls(bloch_basis(theta, phi))


def rotated_tensor(rho: ComplexMatrix, basis: ComplexMatrix, dim_b: int) -> np.ndarray:
    """(U (x) I)^dagger rho (U (x) I) as a 4-index array."""
    dim_a = basis.shape[0]
    t = np.asarray(rho).reshape(dim_a, dim_b, dim_a, dim_b)
    t = np.einsum("ka,aibj,bl->kilj", basis.conj().T, t, basis)
    return t


def disturbance(rho: ComplexMatrix, basis: ComplexMatrix, dim_b: int) -> float:
    """||rho - Pi(rho)||_2^2 = ||rho||^2 - sum_k ||<k|rho|k>||^2 for the basis of A."""
    t = rotated_tensor(rho, basis, dim_b)
    kept = sum(np.sum(np.abs(t[k, :, k, :]) ** 2) for k in range(basis.shape[0]))
    return float(max(np.sum(np.abs(rho) ** 2) - kept, 0.0))


def apply_measurement_a(s: BipartiteState, m: Measurement) -> BipartiteState:
    if m.dim != s.dim_a:
        raise ShapeMismatch(f"measurement on {m.dim} levels applied to dim_a={s.dim_a}")
    t = rotated_tensor(s.rho, m.basis, s.dim_b)
    kept = np.zeros_like(t)
    for k in range(s.dim_a):
        kept[k, :, k, :] = t[k, :, k, :]
    w = np.kron(m.basis, np.eye(s.dim_b))
    rho = w @ kept.reshape(s.dim, s.dim) @ w.conj().T
    return new_bipartite(rho, s.dim_a, s.dim_b)


def apply_measurement_b(s: BipartiteState, m: Measurement) -> BipartiteState:
    if m.dim != s.dim_b:
        raise ShapeMismatch(f"measurement on {m.dim} levels applied to dim_b={s.dim_b}")
    measured = apply_measurement_a(swap_factors(s), m)
    return new_bipartite(swap_matrix(measured.rho, s.dim_b, s.dim_a), s.dim_a, s.dim_b)


def outcome_ensemble(s: BipartiteState, m: Measurement) -> tuple[np.ndarray, tuple[ComplexMatrix, ...]]:
    """Outcome probabilities p_k and the post-measurement states of B."""
    if m.dim != s.dim_a:
        raise ShapeMismatch(f"measurement on {m.dim} levels applied to dim_a={s.dim_a}")
    return conditional_states(s, m.basis)
