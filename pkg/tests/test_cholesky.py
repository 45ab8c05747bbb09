from __future__ import annotations

import numpy as np
import pytest

from src.errors import NotPSDResidual, ValidationError
from src.linalg.dense import hs_norm
from src.sppt.cholesky import (
    BlockCholeskyFactor,
    Side,
    block_cholesky,
    block_view,
    factor_blocks,
    lemma1_normalize,
)
from src.states.bipartite import new_bipartite, swap_factors, tensor
from src.states.families import make_circulant, make_cq, random_state


def _scalar_blocks(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    return a.reshape(n, 1, n, 1)


def test_maximally_mixed_factor():
    factor = block_cholesky(new_bipartite(np.eye(4) / 4, 2, 2))
    assert np.allclose(factor.x_blocks[0], np.eye(2) / 2)
    assert np.allclose(factor.x_blocks[1], np.eye(2) / 2)
    assert np.allclose(factor.s_blocks[(0, 1)], 0)
    assert factor.support_ranks == (2, 2)


def test_cq_state_in_canonical_basis_is_block_diagonal():
    s = make_cq([0.5, 0.3, 0.2], np.eye(3), [np.eye(2) / 2, np.diag([1.0, 0.0]), np.diag([0.3, 0.7])])
    factor = block_cholesky(s)
    for key, sk in factor.s_blocks.items():
        assert np.allclose(sk, 0), key


def test_circulant_coefficient_from_antidiagonal():
    a11, a22, b11, b22, a12, b12 = 0.3, 0.2, 0.25, 0.25, 0.1 + 0.05j, -0.08j
    factor = block_cholesky(make_circulant(a11, a22, b11, b22, a12, b12))
    root = np.sqrt(a11 * b11)
    assert np.allclose(factor.x_blocks[0], np.diag([np.sqrt(a11), np.sqrt(b11)]))
    assert np.allclose(factor.s_blocks[(0, 1)], [[0, a12 / root], [b12 / root, 0]])


def test_factorization_reconstructs_random_states():
    for seed in range(300):
        dim_a, dim_b = 1 + seed % 3, 1 + (seed // 3) % 3
        rank = None if seed % 4 else 1 + seed % (dim_a * dim_b)
        s = random_state(dim_a, dim_b, rank=rank, seed=seed)
        for side in (Side.UP_TO_B, Side.UP_TO_A):
            factor = block_cholesky(s, side)
            target = block_view(s, side).reshape(s.dim, s.dim)
            assert hs_norm(factor.gram() - target) <= 1e-8, (seed, side)


def test_up_to_a_runs_on_swapped_blocks():
    s = random_state(2, 3, seed=7)
    factor = block_cholesky(s, "a")
    assert factor.side is Side.UP_TO_A
    assert factor.n_blocks == 3 and factor.block_dim == 2
    assert np.allclose(block_view(s, Side.UP_TO_A), tensor(swap_factors(s)))


def test_side_parse():
    assert Side.parse("b") is Side.UP_TO_B
    assert Side.parse("UP_TO_A") is Side.UP_TO_A
    with pytest.raises(ValidationError):
        Side.parse("c")


def test_bell_factor_reports_off_support_mass(bell):
    factor = block_cholesky(bell)
    assert factor.support_ranks[0] == 1
    assert factor.off_support == pytest.approx(1 / np.sqrt(2))
    assert hs_norm(factor.gram() - bell.rho) <= 1e-10


def test_non_psd_input_is_a_numerical_failure():
    with pytest.raises(NotPSDResidual):
        factor_blocks(_scalar_blocks(np.array([[1.0, 2.0], [2.0, 1.0]])), Side.UP_TO_B, 1e-9)
    with pytest.raises(NotPSDResidual):
        factor_blocks(_scalar_blocks(np.array([[0.0, 1.0], [1.0, 1.0]])), Side.UP_TO_B, 1e-9)


def test_lemma1_leaves_full_rank_factor_unchanged():
    factor = block_cholesky(random_state(2, 2, seed=3))
    normalized = lemma1_normalize(factor)
    for a, b in zip(factor.x_blocks, normalized.x_blocks):
        assert np.allclose(a, b)
    assert np.allclose(factor.assemble_x(), normalized.assemble_x())


def test_lemma1_on_rank_one_scalar_matrix(rng):
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    factor = factor_blocks(_scalar_blocks(np.outer(v.conj(), v)), Side.UP_TO_B, 1e-12)
    normalized = lemma1_normalize(factor)
    x = normalized.assemble_x()
    assert np.allclose(x[1:], 0, atol=1e-10)
    assert hs_norm(x.conj().T @ x - np.outer(v.conj(), v)) <= 1e-10


def test_lemma1_zeroes_rows_with_empty_support():
    x = np.array(
        [
            [0.0, 0.5, 0.3j, 0.1],
            [0.0, 0.4, 0.2, -0.1j],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ],
        dtype=np.complex128,
    )
    factor = BlockCholeskyFactor.from_upper(x, 1)
    normalized = lemma1_normalize(factor)
    y = normalized.assemble_x()
    assert hs_norm(y.conj().T @ y - x.conj().T @ x) <= 1e-10
    zero_rows = [k for k in range(4) if np.allclose(y[k], 0, atol=1e-10)]
    assert len(zero_rows) == 2
    for k in range(4):
        if abs(y[k, k]) <= 1e-10:
            assert np.allclose(y[k], 0, atol=1e-10)
