"""
Validated bipartite density matrices.

Index convention: |i> (x) |k'> sits at flat index i*dim_b + k (A-major). The
4-index view `tensor(s)[a, i, b, j]` equals rho[a*dim_b + i, b*dim_b + j].
"""

from dataclasses import dataclass, field

import numpy as np

from src.config import DEFAULT_TOLERANCES, Tolerances
from src.errors import (
    BadNormalization,
    IndexOutOfRange,
    NotHermitian,
    NotPositive,
    ShapeMismatch,
    TraceNotOne,
)
from src.linalg.dense import (
    ComplexMatrix,
    as_matrix,
    herm_spectrum,
    hermitian_part,
    hermiticity_residual,
    hs_norm,
)

@dataclass(frozen=True, eq=False)
class BipartiteState:
    dim_a: int
    dim_b: int
    rho: ComplexMatrix

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_a, self.dim_b


@dataclass(frozen=True, eq=False)
class PureState:
    dim_a: int
    dim_b: int
    amplitudes: np.ndarray
    schmidt: tuple[float, ...] = field(default=())

    def density(self) -> BipartiteState:
        psi = self.amplitudes.reshape(-1, 1)
        return new_bipartite(psi @ psi.conj().T, self.dim_a, self.dim_b)


def new_bipartite(
    matrix,
    dim_a: int,
    dim_b: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BipartiteState:
    """
    Validate and wrap a density matrix.

    Small Hermiticity defects (below tol.hermitian relative to the norm) are
    symmetrized away; larger ones raise NotHermitian.
    """
    if dim_a < 1 or dim_b < 1:
        raise ShapeMismatch(f"factor dimensions must be positive, got ({dim_a}, {dim_b})")
    m = as_matrix(matrix)
    n = dim_a * dim_b
    if m.shape != (n, n):
        raise ShapeMismatch(f"matrix shape {m.shape} does not match dims ({dim_a}, {dim_b})")

    residual = hermiticity_residual(m)
    if residual > tol.hermitian * max(1.0, hs_norm(m)):
        raise NotHermitian(f"Hermiticity residual {residual:.3e} exceeds tolerance")
    rho = hermitian_part(m)

    lowest = float(herm_spectrum(rho)[0])
    if lowest < -tol.positivity:
        raise NotPositive(f"minimal eigenvalue {lowest:.3e} is negative")

    trace = np.trace(rho).real
    if abs(trace - 1.0) > tol.trace:
        raise TraceNotOne(f"trace {trace:.12g} differs from 1")

    rho = rho.copy()
    rho.setflags(write=False)
    return BipartiteState(dim_a, dim_b, rho)


def pure_state(amplitudes, dim_a: int, dim_b: int) -> PureState:
    psi = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if psi.size != dim_a * dim_b:
        raise ShapeMismatch(f"{psi.size} amplitudes do not match dims ({dim_a}, {dim_b})")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise BadNormalization(f"amplitude vector has norm {np.linalg.norm(psi):.12g}")
    schmidt = np.linalg.svd(psi.reshape(dim_a, dim_b), compute_uv=False)
    schmidt = schmidt[schmidt > 1e-15]
    psi.setflags(write=False)
    return PureState(dim_a, dim_b, psi, tuple(float(x) for x in schmidt))


def tensor(s: BipartiteState) -> np.ndarray:
    return s.rho.reshape(s.dim_a, s.dim_b, s.dim_a, s.dim_b)


def block_a(s: BipartiteState, i: int, j: int) -> ComplexMatrix:
    """A_ij = (I (x) <i'|) rho (I (x) |j'>), an operator on H_A."""
    if not (0 <= i < s.dim_b and 0 <= j < s.dim_b):
        raise IndexOutOfRange(f"block_a indices ({i}, {j}) outside dim_b={s.dim_b}")
    return tensor(s)[:, i, :, j].copy()


def block_b(s: BipartiteState, k: int, l: int) -> ComplexMatrix:
    """B_kl = (<k| (x) I) rho (|l> (x) I), an operator on H_B."""
    if not (0 <= k < s.dim_a and 0 <= l < s.dim_a):
        raise IndexOutOfRange(f"block_b indices ({k}, {l}) outside dim_a={s.dim_a}")
    return tensor(s)[k, :, l, :].copy()


def partial_transpose_a(s: BipartiteState) -> ComplexMatrix:
    return tensor(s).transpose(2, 1, 0, 3).reshape(s.dim, s.dim).copy()


def partial_transpose_b(s: BipartiteState) -> ComplexMatrix:
    return tensor(s).transpose(0, 3, 2, 1).reshape(s.dim, s.dim).copy()


def partial_trace_b(s: BipartiteState) -> ComplexMatrix:
    """rho_A."""
    return np.einsum("aibi->ab", tensor(s))


def partial_trace_a(s: BipartiteState) -> ComplexMatrix:
    """rho_B."""
    return np.einsum("aiaj->ij", tensor(s))


def swap_matrix(m, dim_first: int, dim_second: int) -> ComplexMatrix:
    """Reorder an operator on H_1 (x) H_2 to H_2 (x) H_1."""
    n = dim_first * dim_second
    t = np.asarray(m).reshape(dim_first, dim_second, dim_first, dim_second)
    return t.transpose(1, 0, 3, 2).reshape(n, n).copy()


def swap_factors(s: BipartiteState) -> BipartiteState:
    """The same state on H_B (x) H_A, so every B-side question becomes an A-side one."""
    swapped = swap_matrix(s.rho, s.dim_a, s.dim_b)
    swapped.setflags(write=False)
    return BipartiteState(s.dim_b, s.dim_a, swapped)


def conjugate_local(s: BipartiteState, u, v) -> BipartiteState:
    """(U (x) V) rho (U (x) V)^dagger for local unitaries U on H_A and V on H_B."""
    w = np.kron(as_matrix(u), as_matrix(v))
    rho = hermitian_part(w @ s.rho @ w.conj().T)
    rho.setflags(write=False)
    return BipartiteState(s.dim_a, s.dim_b, rho)


def purity(s: BipartiteState) -> float:
    return float(np.real(np.vdot(s.rho, s.rho)))


def is_pure(s: BipartiteState, tol: float = 1e-9) -> bool:
    return purity(s) >= 1.0 - tol
