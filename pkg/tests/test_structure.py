from __future__ import annotations

import numpy as np
import pytest

from src.criteria.structure import (
    cluster_weights,
    eigenspace_decomposition,
    is_cq,
    is_ppt,
    is_product,
    is_qc,
    is_zero_min_a,
    is_zero_min_b,
    marginal_commutes_a,
    marginal_commutes_b,
)
from src.linalg.dense import hs_norm, random_unitary
from src.states.bipartite import block_a, conjugate_local, partial_trace_b, swap_factors
from src.states.families import (
    make_cq,
    make_example3,
    make_werner,
    random_cq,
    random_density,
    random_product,
    random_qc,
    random_state,
)


def _eigenspaces_within_blocks(s, gap_tol: float = 1e-7, tol: float = 1e-7) -> bool:
    """Every eigenspace of rho_A sits inside one eigenspace of each A_ij."""
    decomposition = eigenspace_decomposition(partial_trace_b(s), gap_tol)
    for v in decomposition.bases:
        for i in range(s.dim_b):
            for j in range(s.dim_b):
                a = block_a(s, i, j)
                m = v.conj().T @ a @ v
                scalar = np.trace(m) / m.shape[0]
                if hs_norm(m - scalar * np.eye(m.shape[0])) > tol:
                    return False
                if hs_norm(a @ v - scalar * v) > tol:
                    return False
    return True


def _cq_with_weights(weights, sigmas, seed: int):
    rng = np.random.default_rng(seed)
    kets = random_unitary(len(weights), rng)
    return make_cq(weights, kets, sigmas)


def test_ppt_on_bell_and_werner(bell):
    result = is_ppt(bell)
    assert not result
    assert result.min_eigenvalue == pytest.approx(-0.5)
    assert not is_ppt(make_werner(0.5))
    assert is_ppt(make_werner(0.3))
    assert is_ppt(random_cq(3, 2, seed=1))


def test_cq_battery_recovers_weights():
    for seed in range(200):
        dim_a = 2 + seed % 3
        dim_b = 2 + (seed // 3) % 3
        s = random_cq(dim_a, dim_b, seed=seed)
        witness = is_cq(s)
        assert witness, seed
        assert hs_norm(witness.reconstruct() - s.rho) <= 1e-7


def test_cq_weights_match_inputs_up_to_permutation():
    sigmas = [np.diag([1.0, 0.0]), np.eye(2) / 2, np.diag([0.2, 0.8])]
    s = _cq_with_weights([0.5, 0.3, 0.2], sigmas, seed=3)
    witness = is_cq(s)
    assert witness
    assert sorted(np.round(witness.weights, 10)) == [0.2, 0.3, 0.5]


def test_bell_is_not_cq(bell):
    witness = is_cq(bell)
    assert not witness
    assert witness.max_violation > 1e-3


def test_example3_is_cq_for_any_parameters():
    for params in [
        (0.2, 0.1, 0.15, 0.2, 0.1, 0.05, 0.05),
        (0.25, 0.2, 0.05, 0.2, 0.1j, -0.05, 0.0),
        (0.1, 0.3, 0.2, 0.1, 0.0, 0.1, 0.15),
    ]:
        assert is_cq(make_example3(*params))


def test_qc_mirrors_cq():
    s = random_qc(2, 3, seed=5)
    assert is_qc(s)
    assert is_cq(swap_factors(s))
    assert not is_qc(random_state(2, 2, seed=3))
    assert np.allclose(is_qc(s).reconstruct(), s.rho, atol=1e-8)


def test_marginal_commutation(bell):
    assert marginal_commutes_a(random_cq(3, 3, seed=2))
    assert marginal_commutes_b(random_qc(3, 2, seed=2))
    assert marginal_commutes_a(make_werner(0.0))
    assert marginal_commutes_a(bell)
    assert not is_cq(bell)


def test_eigenspace_decomposition_multiplicities():
    assert eigenspace_decomposition(np.eye(3) / 3).multiplicities == (3,)
    assert eigenspace_decomposition(np.diag([0.7, 0.3])).multiplicities == (1, 1)
    assert eigenspace_decomposition(np.diag([0.5, 0.5, 0.0])).multiplicities == (1, 2)


def test_cluster_weights_skips_zero_weights():
    assert cluster_weights(np.array([0.5, 0.0, 0.5]), 1e-7) == [[0, 2]]
    assert cluster_weights(np.array([0.2, 0.3, 0.5]), 1e-7) == [[0], [1], [2]]


def test_zero_min_on_products_and_nondegenerate_cq(rng):
    assert is_zero_min_a(random_product(2, 3, seed=1))
    assert is_zero_min_b(random_product(2, 3, seed=1))
    sigmas = [random_density(2, rng) for _ in range(3)]
    assert is_zero_min_a(_cq_with_weights([0.5, 0.3, 0.2], sigmas, seed=4))


def test_zero_min_example3_boundary():
    # a + c = b + d makes all three weights equal
    assert is_zero_min_a(make_example3(0.2, 0.2, 0.13333333333333333, 0.13333333333333333, 0.1, 0.1, 0.1))
    witness = is_zero_min_a(make_example3(0.2, 0.2, 0.13333333333333333, 0.13333333333333333, 0.1, 0.05, 0.1))
    assert not witness
    assert witness.violating_pair is not None
    assert not is_zero_min_a(make_example3(0.25, 0.2, 0.08333333333333333, 0.13333333333333333, 0.1, 0.1, 0.1))


def test_zero_min_is_false_for_non_cq(bell):
    witness = is_zero_min_a(bell)
    assert not witness
    assert not witness.cq


def test_zero_min_matches_eigenspace_containment():
    rng = np.random.default_rng(11)
    for trial in range(20):
        shared = random_density(3, rng)
        other = random_density(3, rng)
        same = trial % 2 == 0
        sigmas = [shared, shared if same else random_density(3, rng), other]
        s = _cq_with_weights([0.3, 0.3, 0.4], sigmas, seed=100 + trial)
        assert bool(is_zero_min_a(s)) == _eigenspaces_within_blocks(s) == same


def test_product_predicate(bell):
    assert is_product(random_product(3, 2, seed=8))
    assert not is_product(bell)
    mixture = make_cq([0.5, 0.5], np.eye(2), [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert not is_product(mixture)
    assert is_product(mixture).residual == pytest.approx(0.5)


def test_predicates_are_local_unitary_invariant(rng):
    states = [random_cq(2, 3, seed=1), random_qc(3, 2, seed=2), random_product(2, 2, seed=3), make_werner(0.5)]
    for s in states:
        t = conjugate_local(s, random_unitary(s.dim_a, rng), random_unitary(s.dim_b, rng))
        assert bool(is_cq(s)) == bool(is_cq(t, 1e-7))
        assert bool(is_qc(s)) == bool(is_qc(t, 1e-7))
        assert bool(is_product(s)) == bool(is_product(t, 1e-7))
        assert bool(is_ppt(s)) == bool(is_ppt(t, 1e-8))
        assert bool(is_zero_min_a(s)) == bool(is_zero_min_a(t, 1e-7))


def test_cq_limit_of_cq_sequence_is_cq():
    base = make_cq([0.6, 0.4], np.eye(2), [np.diag([1.0, 0.0]), np.eye(2) / 2])
    for n in (1, 10, 100, 1000):
        sigma = np.diag([1.0 - 1.0 / (n + 1), 1.0 / (n + 1)])
        s = make_cq([0.6, 0.4], np.eye(2), [sigma, np.eye(2) / 2])
        assert is_cq(s)
        assert hs_norm(s.rho - base.rho) < 1.0 / n
    assert is_cq(base)


def _example3_sample(rng: np.random.Generator, zero_min: bool):
    """Valid Example 3 parameters with a + c = b + d, so rho_A = I/3."""
    third = 1.0 / 3.0
    while True:
        a = rng.uniform(0.05, 0.28)
        c = third - a
        if zero_min:
            coupling = rng.uniform(0.0, 0.9) * np.sqrt(a * c) * np.exp(2j * np.pi * rng.uniform())
            return make_example3(a, a, c, c, coupling, coupling, coupling)
        b = rng.uniform(0.05, 0.28)
        d = third - b
        e, f = (rng.uniform(0.0, 0.9) * np.sqrt(a * c) * np.exp(2j * np.pi * rng.uniform()) for _ in range(2))
        g = rng.uniform(0.0, 0.9) * np.sqrt(b * d) * np.exp(2j * np.pi * rng.uniform())
        if max(abs(a - b), abs(e - f), abs(f - g), abs(e - g)) >= 0.02:
            return make_example3(a, b, c, d, e, f, g)


def test_example3_zero_min_boundary_battery():
    rng = np.random.default_rng(33)
    for trial in range(100):
        s = _example3_sample(rng, zero_min=True)
        assert is_cq(s), trial
        assert is_zero_min_a(s, 1e-8), trial
    for trial in range(100):
        s = _example3_sample(rng, zero_min=False)
        assert is_cq(s), trial
        assert not is_zero_min_a(s, 1e-8), trial


def test_werner_scan_finds_ppt_boundary_at_one_third():
    grid = np.round(np.arange(0, 1001) * 1e-3, 12)
    verdicts = [bool(is_ppt(make_werner(p))) for p in grid]
    first_npt = verdicts.index(False)
    assert all(verdicts[:first_npt])
    assert not any(verdicts[first_npt:])
    assert abs(grid[first_npt] - 1.0 / 3.0) <= 1e-3


def test_predicate_battery_is_local_unitary_invariant():
    rng = np.random.default_rng(44)
    relaxed = 10 * 1e-8
    for seed in range(40):
        dim_a, dim_b = 2 + seed % 2, 2 + (seed // 2) % 2
        s = [random_cq, random_qc, random_product, random_state][seed % 4](dim_a, dim_b, seed=seed)
        t = conjugate_local(s, random_unitary(dim_a, rng), random_unitary(dim_b, rng))
        assert bool(is_cq(s)) == bool(is_cq(t, relaxed)), seed
        assert bool(is_qc(s)) == bool(is_qc(t, relaxed)), seed
        assert bool(is_product(s)) == bool(is_product(t, relaxed)), seed
        assert bool(is_ppt(s)) == bool(is_ppt(t, 10 * 1e-9)), seed
        assert bool(is_zero_min_a(s)) == bool(is_zero_min_a(t, relaxed)), seed
