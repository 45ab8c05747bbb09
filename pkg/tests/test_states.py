from __future__ import annotations

import numpy as np
import pytest

from src.errors import (
    BadNormalization,
    BadProbabilities,
    BadSigma,
    IndexOutOfRange,
    NotContraction,
    NotHermitian,
    NotOrthonormal,
    NotPositive,
    ShapeMismatch,
    TraceNotOne,
)
from src.linalg.dense import hs_norm, random_unitary
from src.states.bipartite import (
    block_a,
    block_b,
    conjugate_local,
    is_pure,
    new_bipartite,
    partial_trace_a,
    partial_trace_b,
    partial_transpose_a,
    partial_transpose_b,
    pure_state,
    purity,
    swap_factors,
)
from src.states.families import (
    make_circulant,
    make_cq,
    make_example1,
    make_example3,
    make_product,
    make_pure_schmidt,
    make_qc,
    make_werner,
    random_cq,
    random_density,
    random_state,
)


def test_new_bipartite_validates_in_order():
    with pytest.raises(ShapeMismatch):
        new_bipartite(np.eye(3) / 3, 2, 2)
    with pytest.raises(NotHermitian):
        new_bipartite(np.array([[0.5, 0.3], [0.0, 0.5]]), 2, 1)
    with pytest.raises(NotPositive):
        new_bipartite(np.diag([1.5, -0.5]), 2, 1)
    with pytest.raises(TraceNotOne):
        new_bipartite(np.eye(4) / 2, 2, 2)


def test_state_matrix_is_read_only():
    s = new_bipartite(np.eye(4) / 4, 2, 2)
    with pytest.raises(ValueError):
        s.rho[0, 0] = 1.0


def test_blocks_follow_a_major_ordering(bell):
    assert np.allclose(block_b(bell, 0, 1), [[0, 0.5], [0, 0]])
    assert np.allclose(block_a(bell, 0, 1), [[0, 0.5], [0, 0]])
    with pytest.raises(IndexOutOfRange):
        block_a(bell, 2, 0)


def test_partial_operations_on_bell(bell):
    assert np.allclose(partial_trace_b(bell), np.eye(2) / 2)
    assert np.allclose(partial_trace_a(bell), np.eye(2) / 2)
    flip = np.zeros((4, 4))
    flip[[0, 1, 2, 3], [0, 2, 1, 3]] = 0.5
    assert np.allclose(partial_transpose_a(bell), flip)
    assert np.allclose(partial_transpose_b(bell), flip)


def test_partial_traces_of_product(rng):
    a, b = random_density(2, rng), random_density(3, rng)
    s = make_product(a, b)
    assert np.allclose(partial_trace_b(s), a)
    assert np.allclose(partial_trace_a(s), b)


def test_swap_factors_exchanges_marginals(rng):
    s = random_state(2, 3, seed=4)
    t = swap_factors(s)
    assert t.dims == (3, 2)
    assert np.allclose(partial_trace_b(t), partial_trace_a(s))
    assert np.allclose(swap_factors(t).rho, s.rho)


def test_conjugate_local_preserves_spectrum(rng):
    s = random_state(2, 2, seed=1)
    t = conjugate_local(s, random_unitary(2, rng), random_unitary(2, rng))
    assert np.allclose(np.linalg.eigvalsh(t.rho), np.linalg.eigvalsh(s.rho))


def test_pure_state_schmidt_and_purity(bell):
    psi = pure_state(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2)
    assert np.allclose(psi.schmidt, [1 / np.sqrt(2)] * 2)
    assert purity(bell) == pytest.approx(1.0)
    assert is_pure(bell)
    assert not is_pure(new_bipartite(np.eye(4) / 4, 2, 2))
    with pytest.raises(BadNormalization):
        pure_state([1, 1, 0, 0], 2, 2)


def test_make_cq_and_qc_validate_inputs():
    sigma = np.eye(2) / 2
    with pytest.raises(BadProbabilities):
        make_cq([0.7, 0.7], np.eye(2), [sigma, sigma])
    with pytest.raises(NotOrthonormal):
        make_cq([0.5, 0.5], np.array([[1, 1], [0, 1]]), [sigma, sigma])
    with pytest.raises(BadSigma):
        make_qc([0.5, 0.5], np.eye(2), [sigma, 2 * sigma])


def test_make_cq_is_block_diagonal_in_its_basis():
    s = make_cq([0.25, 0.75], np.eye(2), [np.diag([1.0, 0.0]), np.eye(2) / 2])
    assert np.allclose(block_b(s, 0, 1), 0)
    assert np.allclose(block_b(s, 0, 0), np.diag([0.25, 0.0]))


def test_make_circulant_identity_point():
    s = make_circulant(0.25, 0.25, 0.25, 0.25)
    assert np.allclose(s.rho, np.eye(4) / 4)
    with pytest.raises(NotPositive):
        make_circulant(0.25, 0.25, 0.25, 0.25, a12=0.5)


def test_make_werner_range():
    assert np.allclose(make_werner(0.0).rho, np.eye(4) / 4)
    with pytest.raises(BadProbabilities):
        make_werner(1.5)


def test_make_example1_rejects_non_contraction():
    with pytest.raises(NotContraction):
        make_example1(np.eye(2), 2 * np.eye(2), np.eye(2))


def test_make_example3_is_a_major():
    s = make_example3(0.2, 0.1, 0.15, 0.2, 0.1, 0.05, 0.05)
    assert s.dims == (3, 2)
    # |k> (x) |0'> carries the first display block diag(a, a, b)
    assert np.allclose(np.diag(s.rho)[0::2], [0.2, 0.2, 0.1])
    assert np.allclose(np.diag(s.rho)[1::2], [0.15, 0.15, 0.2])
    assert s.rho[0, 1] == pytest.approx(0.1)


def test_make_pure_schmidt_requires_normalization():
    p = make_pure_schmidt([np.sqrt(0.9), np.sqrt(0.1)])
    assert np.allclose(partial_trace_b(p.density()), np.diag([0.9, 0.1]))
    with pytest.raises(BadNormalization):
        make_pure_schmidt([0.5, 0.5])


def test_seeded_generators_are_deterministic():
    assert hs_norm(random_cq(3, 2, seed=9).rho - random_cq(3, 2, seed=9).rho) == 0.0
    assert random_state(2, 2, rank=1, seed=2).rho.shape == (4, 4)
