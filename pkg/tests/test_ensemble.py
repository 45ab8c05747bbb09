from __future__ import annotations

import numpy as np
import pytest

from src.criteria.structure import is_ppt
from src.errors import NotSSPPT
from src.linalg.dense import hs_norm
from src.sppt.cholesky import Side
from src.sppt.decision import find_ssppt_frame
from src.sppt.ensemble import extract_separable_ensemble
from src.sppt.generator import make_ssppt_random
from src.states.bipartite import new_bipartite
from src.states.families import random_cq, random_product, random_qc


def _assert_pure_terms(ensemble) -> None:
    for term in ensemble.terms:
        assert term.p > 0
        for proj in (term.a, term.b):
            assert np.trace(proj).real == pytest.approx(1.0)
            assert np.allclose(proj @ proj, proj, atol=1e-10)


def _distinct(mats) -> list:
    seen: list = []
    for m in mats:
        if not any(np.allclose(m, other, atol=1e-8) for other in seen):
            seen.append(m)
    return seen


def test_product_state_ensemble_has_one_a_factor_per_row():
    s = random_product(3, 2, seed=8)
    ensemble = extract_separable_ensemble(s, Side.UP_TO_B)
    assert ensemble.residual <= 1e-9
    assert len(_distinct([t.a for t in ensemble.terms])) <= 3
    _assert_pure_terms(ensemble)


def test_classical_states_need_at_most_dim_a_times_dim_b_terms():
    for seed in range(20):
        qc = random_qc(3, 2, seed=seed)
        ensemble = extract_separable_ensemble(qc, Side.UP_TO_B)
        assert len(ensemble) <= 6
        assert ensemble.residual < 1e-9

        cq = random_cq(2, 3, seed=seed)
        ensemble = extract_separable_ensemble(cq, Side.UP_TO_A)
        assert len(ensemble) <= 6
        assert ensemble.residual < 1e-9


def test_generated_states_rebuild_from_their_ensembles():
    dims = [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (3, 4)]
    for seed in range(100):
        dim_a, dim_b = dims[seed % len(dims)]
        side = Side.UP_TO_B if seed % 2 == 0 else Side.UP_TO_A
        s = make_ssppt_random(dim_a, dim_b, side, seed=seed)
        ensemble = extract_separable_ensemble(s, side)
        assert ensemble.residual <= 1e-8, (seed, side)
        assert ensemble.weight_sum == pytest.approx(1.0, abs=1e-8)
        rebuilt = new_bipartite(ensemble.reconstruct(), dim_a, dim_b)
        assert is_ppt(rebuilt), seed
        _assert_pure_terms(ensemble)


def test_extraction_through_a_local_frame():
    s = random_cq(3, 2, seed=12)
    report = find_ssppt_frame(s, Side.UP_TO_B)
    assert report
    ensemble = extract_separable_ensemble(s, Side.UP_TO_B, frame=report.frame)
    assert hs_norm(ensemble.reconstruct() - s.rho) <= 1e-8


def test_entangled_state_has_no_ensemble(bell):
    with pytest.raises(NotSSPPT):
        extract_separable_ensemble(bell, Side.UP_TO_B)
