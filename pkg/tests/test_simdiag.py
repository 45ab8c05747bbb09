from __future__ import annotations

import numpy as np
import pytest

from src.errors import NotCommutingFamily, ShapeMismatch
from src.linalg.dense import hs_norm, random_unitary
from src.linalg.simdiag import family_violation, off_diagonal_residual, simultaneous_diagonalize


def _commuting_family(n: int, count: int, rng: np.random.Generator, degenerate: bool = False):
    w = random_unitary(n, rng)
    family = []
    for _ in range(count):
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if degenerate:
            d[1] = d[0]
        family.append((w * d) @ w.conj().T)
    return family


def test_diagonalizes_commuting_normal_family(rng):
    family = _commuting_family(4, 3, rng)
    u = simultaneous_diagonalize(family)
    assert hs_norm(u.conj().T @ u - np.eye(4)) <= 1e-10
    for m in family:
        assert off_diagonal_residual(u, m) <= 1e-8


def test_shared_degeneracy_is_split_by_other_members(rng):
    w = random_unitary(3, rng)
    a = (w * np.array([1.0, 1.0, 2.0])) @ w.conj().T
    b = (w * np.array([0.0, 1.0j, 1.0j])) @ w.conj().T
    u = simultaneous_diagonalize([a, b])
    assert off_diagonal_residual(u, a) <= 1e-8
    assert off_diagonal_residual(u, b) <= 1e-8


def test_fully_degenerate_family_is_fine(rng):
    family = _commuting_family(3, 2, rng, degenerate=True)
    u = simultaneous_diagonalize(family)
    for m in family:
        assert off_diagonal_residual(u, m) <= 1e-8


def test_result_is_seed_deterministic(rng):
    family = _commuting_family(4, 2, rng)
    assert np.array_equal(simultaneous_diagonalize(family, seed=5), simultaneous_diagonalize(family, seed=5))


def test_non_commuting_family_is_rejected():
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    z = np.diag([1.0, -1.0]).astype(np.complex128)
    assert family_violation([x, z]) > 0.1
    with pytest.raises(NotCommutingFamily):
        simultaneous_diagonalize([x, z])


def test_non_normal_member_is_rejected():
    with pytest.raises(NotCommutingFamily):
        simultaneous_diagonalize([np.array([[0, 1], [0, 0]], dtype=np.complex128)])


def test_empty_and_mismatched_families():
    with pytest.raises(ShapeMismatch):
        simultaneous_diagonalize([])
    with pytest.raises(ShapeMismatch):
        simultaneous_diagonalize([np.eye(2), np.eye(3)])


def test_commuting_family_battery_up_to_twelve_dimensions():
    rng = np.random.default_rng(12)
    for trial in range(200):
        n = 2 + trial % 11
        family = _commuting_family(n, 1 + trial % 3, rng, degenerate=trial % 4 == 0)
        u = simultaneous_diagonalize(family, tol=1e-9)
        assert hs_norm(u.conj().T @ u - np.eye(n)) <= 1e-10, trial
        for m in family:
            assert off_diagonal_residual(u, m) <= 1e-9, trial
