"""Samplers that land inside the SSPPT set by construction."""

import numpy as np

from src.linalg.dense import hermitian_part, psd_sqrt, random_unitary
from src.sppt.cholesky import Side
from src.states.bipartite import BipartiteState, new_bipartite, swap_matrix
from src.states.families import make_circulant

DIAGONAL_SHIFT = 0.1


def ssppt_factor(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Block upper-triangular X whose row k is [0 ... X_k, S_k,k+1 X_k, ...]
    with S_kl = W_k D_l W_k^dagger, so every row family is commuting normal.
    """
    x = np.zeros((m * n, m * n), dtype=np.complex128)
    for k in range(m):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        xk = psd_sqrt(hermitian_part(g @ g.conj().T) + DIAGONAL_SHIFT * np.eye(n))
        w = random_unitary(n, rng)
        x[k * n : (k + 1) * n, k * n : (k + 1) * n] = xk
        for l in range(k + 1, m):
            d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            s = (w * d) @ w.conj().T
            x[k * n : (k + 1) * n, l * n : (l + 1) * n] = s @ xk
    return x


def make_ssppt_random(
    dim_a: int,
    dim_b: int,
    side: Side = Side.UP_TO_B,
    seed: int = 0,
) -> BipartiteState:
    side = Side.parse(side)
    rng = np.random.default_rng(seed)
    m, n = (dim_a, dim_b) if side is Side.UP_TO_B else (dim_b, dim_a)
    x = ssppt_factor(m, n, rng)
    rho = x.conj().T @ x
    rho /= np.trace(rho).real
    if side is Side.UP_TO_A:
        rho = swap_matrix(rho, dim_b, dim_a)
    return new_bipartite(hermitian_part(rho), dim_a, dim_b)


def ssppt_midpoint_fixture() -> tuple[BipartiteState, BipartiteState, BipartiteState]:
    """
    Two circulant states that are SSPPT up to B and whose equal mixture is
    not: the mixture has |a12| != |b12|. The mixture is still PPT.
    """
    first = make_circulant(0.25, 0.25, 0.25, 0.25, a12=0.1, b12=0.1)
    second = make_circulant(0.25, 0.25, 0.25, 0.25, a12=0.1, b12=-0.1)
    midpoint = new_bipartite((first.rho + second.rho) / 2, 2, 2)
    return first, second, midpoint
