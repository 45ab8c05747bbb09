"""
Constructors for the state families the criteria are exercised on.

Every constructor returns a state that passed `new_bipartite` validation.
Seeded generators use numpy's default_rng and are deterministic per seed.
"""

from typing import Sequence

import numpy as np

from src.errors import (
    BadNormalization,
    BadProbabilities,
    BadRank,
    BadSigma,
    NotContraction,
    NotOrthonormal,
    NotPSD,
    QcorrError,
    ShapeMismatch,
)
from src.linalg.dense import (
    ComplexMatrix,
    as_matrix,
    herm_spectrum,
    hermitian_part,
    hermiticity_residual,
    hs_norm,
    operator_norm,
    psd_sqrt,
    random_unitary,
)
from src.states.bipartite import BipartiteState, PureState, new_bipartite, pure_state

PROBABILITY_TOL = 1e-9
CONTRACTION_SLACK = 1e-12


def _check_weights(weights, count: int) -> np.ndarray:
    p = np.asarray(weights, dtype=float).reshape(-1)
    if p.size != count:
        raise BadProbabilities(f"{p.size} weights for {count} terms")
    if np.any(p < -PROBABILITY_TOL) or abs(p.sum() - 1.0) > PROBABILITY_TOL:
        raise BadProbabilities(f"weights {p.tolist()} are not a probability vector")
    return np.clip(p, 0.0, None)


def _check_orthonormal(kets, dim: int) -> ComplexMatrix:
    k = as_matrix(kets)
    if k.shape[0] != dim:
        raise ShapeMismatch(f"kets have {k.shape[0]} rows, expected {dim}")
    if hs_norm(k.conj().T @ k - np.eye(k.shape[1])) > 1e-9:
        raise NotOrthonormal("ket columns are not orthonormal")
    return k


def _check_density(sigma, dim: int | None = None) -> ComplexMatrix:
    s = as_matrix(sigma)
    if s.shape[0] != s.shape[1] or (dim is not None and s.shape[0] != dim):
        raise BadSigma(f"conditional state has shape {s.shape}")
    if hermiticity_residual(s) > 1e-9 * max(1.0, hs_norm(s)):
        raise BadSigma("conditional state is not Hermitian")
    s = hermitian_part(s)
    if herm_spectrum(s)[0] < -1e-9 or abs(np.trace(s).real - 1.0) > 1e-9:
        raise BadSigma("conditional state is not a unit-trace PSD matrix")
    return s


def make_product(rho_a, rho_b) -> BipartiteState:
    a = _check_density(rho_a)
    b = _check_density(rho_b)
    return new_bipartite(np.kron(a, b), a.shape[0], b.shape[0])


def make_cq(weights, kets, sigmas: Sequence) -> BipartiteState:
    """sum_k p_k |k><k| (x) sigma_k with {|k>} the orthonormal columns of `kets`."""
    if not sigmas:
        raise BadSigma("at least one conditional state is required")
    dim_b = as_matrix(sigmas[0]).shape[0]
    k = as_matrix(kets)
    k = _check_orthonormal(k, k.shape[0])
    p = _check_weights(weights, k.shape[1])
    if len(sigmas) != k.shape[1]:
        raise BadSigma(f"{len(sigmas)} conditional states for {k.shape[1]} kets")
    rho = np.zeros((k.shape[0] * dim_b,) * 2, dtype=np.complex128)
    for weight, col, sigma in zip(p, k.T, sigmas):
        proj = np.outer(col, col.conj())
        rho += weight * np.kron(proj, _check_density(sigma, dim_b))
    return new_bipartite(rho, k.shape[0], dim_b)


def make_qc(weights, kets, sigmas: Sequence) -> BipartiteState:
    """sum_j q_j sigma_j (x) |j'><j'| with {|j'>} the orthonormal columns of `kets` in H_B."""
    if not sigmas:
        raise BadSigma("at least one conditional state is required")
    dim_a = as_matrix(sigmas[0]).shape[0]
    k = as_matrix(kets)
    k = _check_orthonormal(k, k.shape[0])
    q = _check_weights(weights, k.shape[1])
    if len(sigmas) != k.shape[1]:
        raise BadSigma(f"{len(sigmas)} conditional states for {k.shape[1]} kets")
    rho = np.zeros((dim_a * k.shape[0],) * 2, dtype=np.complex128)
    for weight, col, sigma in zip(q, k.T, sigmas):
        proj = np.outer(col, col.conj())
        rho += weight * np.kron(_check_density(sigma, dim_a), proj)
    return new_bipartite(rho, dim_a, k.shape[0])


def make_circulant(
    a11: float,
    a22: float,
    b11: float,
    b22: float,
    a12: complex = 0.0,
    b12: complex = 0.0,
) -> BipartiteState:
    """
    2x2 circulant family: the a-entries couple |00> with |11>, the
    b-entries couple |01> with |10>.
    """
    m = np.array(
        [
            [a11, 0, 0, a12],
            [0, b11, b12, 0],
            [0, np.conj(b12), b22, 0],
            [np.conj(a12), 0, 0, a22],
        ],
        dtype=np.complex128,
    )
    return new_bipartite(m, 2, 2)


def make_werner(p: float) -> BipartiteState:
    if not 0.0 <= p <= 1.0:
        raise BadProbabilities(f"Werner weight {p} outside [0, 1]")
    phi = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2)
    return new_bipartite(p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4, 2, 2)


def make_example1(rho11, d, t) -> BipartiteState:
    """
    2 (x) n block state [[rho11, sqrt(rho11) T Q^(1/2)], [Q^(1/2) T^dagger sqrt(rho11), Q]]
    with Q = sqrt(rho11) D D^dagger sqrt(rho11), normalized by Tr(rho11 + Q).
    """
    r = as_matrix(rho11)
    d, t = as_matrix(d), as_matrix(t)
    n = r.shape[0]
    if r.shape != (n, n) or d.shape != (n, n) or t.shape != (n, n):
        raise ShapeMismatch("rho11, D and T must be square of one size")
    if operator_norm(d) > 1 + CONTRACTION_SLACK or operator_norm(t) > 1 + CONTRACTION_SLACK:
        raise NotContraction("D and T must have operator norm at most 1")
    try:
        root = psd_sqrt(r)
    except QcorrError as exc:
        raise NotPSD(f"rho11 is not positive semidefinite: {exc}") from exc
    q = hermitian_part(root @ d @ d.conj().T @ root)
    top = root @ t @ psd_sqrt(q)
    norm = np.trace(r + q).real
    if norm <= 0:
        raise BadNormalization("rho11 must be nonzero")
    m = np.block([[r, top], [top.conj().T, q]]) / norm
    return new_bipartite(m, 2, n)


def make_example3(a: float, b: float, c: float, d: float, e: complex, f: complex, g: complex) -> BipartiteState:
    """
    3 (x) 2 family. Parameters follow the B-major block display
    [[diag(a,a,b), diag(e,f,g)], [diag(e,f,g)^dagger, diag(c,c,d)]],
    permuted here to A-major order.
    """
    display = np.zeros((6, 6), dtype=np.complex128)
    display[:3, :3] = np.diag([a, a, b])
    display[3:, 3:] = np.diag([c, c, d])
    display[:3, 3:] = np.diag([e, f, g])
    display[3:, :3] = np.diag(np.conj([e, f, g]))
    m = display.reshape(2, 3, 2, 3).transpose(1, 0, 3, 2).reshape(6, 6)
    return new_bipartite(m, 3, 2)


def make_pure_schmidt(lambdas: Sequence[float]) -> PureState:
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if lam.size == 0 or np.any(lam <= 0):
        raise BadNormalization("Schmidt coefficients must be positive")
    if abs(np.sum(lam**2) - 1.0) > 1e-10:
        raise BadNormalization(f"sum of squared Schmidt coefficients is {np.sum(lam**2):.12g}")
    lam = np.sort(lam)[::-1]
    n = lam.size
    psi = np.zeros(n * n, dtype=np.complex128)
    psi[np.arange(n) * n + np.arange(n)] = lam
    return pure_state(psi, n, n)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> ComplexMatrix:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return hermitian_part(rho / np.trace(rho).real)


def random_state(dim_a: int, dim_b: int, rank: int | None = None, seed: int = 0) -> BipartiteState:
    n = dim_a * dim_b
    rank = n if rank is None else rank
    if not 1 <= rank <= n:
        raise BadRank(f"rank {rank} outside [1, {n}]")
    rng = np.random.default_rng(seed)
    return new_bipartite(random_density(n, rng, rank), dim_a, dim_b)


def random_product(dim_a: int, dim_b: int, seed: int = 0) -> BipartiteState:
    rng = np.random.default_rng(seed)
    return make_product(random_density(dim_a, rng), random_density(dim_b, rng))


def _random_weights(count: int, rng: np.random.Generator) -> np.ndarray:
    w = rng.dirichlet(np.ones(count))
    return w / w.sum()


def random_cq(dim_a: int, dim_b: int, seed: int = 0, terms: int | None = None) -> BipartiteState:
    rng = np.random.default_rng(seed)
    terms = dim_a if terms is None else terms
    kets = random_unitary(dim_a, rng)[:, :terms]
    sigmas = [random_density(dim_b, rng) for _ in range(terms)]
    return make_cq(_random_weights(terms, rng), kets, sigmas)


def random_qc(dim_a: int, dim_b: int, seed: int = 0, terms: int | None = None) -> BipartiteState:
    rng = np.random.default_rng(seed)
    terms = dim_b if terms is None else terms
    kets = random_unitary(dim_b, rng)[:, :terms]
    sigmas = [random_density(dim_a, rng) for _ in range(terms)]
    return make_qc(_random_weights(terms, rng), kets, sigmas)
