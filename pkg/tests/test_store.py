from __future__ import annotations

import json

import numpy as np
import pytest

from src.config import Tolerances
from src.errors import NotHermitian, StateFileError, TraceNotOne
from src.sppt.cholesky import Side
from src.sppt.ensemble import extract_separable_ensemble
from src.sppt.generator import make_ssppt_random
from src.states.families import random_state
from src.storage.state_store import StateStore, encode_matrix


def test_state_round_trip_is_bit_exact(tmp_path):
    store = StateStore(tmp_path)
    s = random_state(2, 3, seed=17)
    path = store.save_state(s, "mixed")
    assert path == tmp_path / "mixed.json"
    loaded = store.load_state("mixed")
    assert loaded.dims == (2, 3)
    assert np.array_equal(loaded.rho, s.rho)
    assert store.exists("mixed")
    assert store.list_states() == [path]


def test_ensemble_round_trip(tmp_path):
    store = StateStore(tmp_path)
    s = make_ssppt_random(2, 2, Side.UP_TO_B, seed=3)
    ensemble = extract_separable_ensemble(s)
    store.save_ensemble(ensemble, tmp_path / "ens.json")
    loaded = store.load_ensemble(tmp_path / "ens.json")
    assert len(loaded) == len(ensemble)
    assert loaded.residual == ensemble.residual
    assert np.allclose(loaded.reconstruct(), s.rho, atol=1e-8)


def test_missing_file(tmp_path):
    with pytest.raises(StateFileError):
        StateStore(tmp_path).load_state("nothing")


def test_bad_json_and_bad_payloads(tmp_path):
    store = StateStore(tmp_path)
    (tmp_path / "broken.json").write_text("{not json")
    with pytest.raises(StateFileError):
        store.load_state("broken")

    (tmp_path / "short.json").write_text(json.dumps({"dim_a": 2, "matrix": []}))
    with pytest.raises(StateFileError):
        store.load_state("short")

    (tmp_path / "flat.json").write_text(json.dumps({"dim_a": 1, "dim_b": 1, "matrix": [[1.0]]}))
    with pytest.raises(StateFileError):
        store.load_state("flat")


def test_invalid_matrix_is_reported_with_its_file(tmp_path):
    m = np.array([[0.5, 0.3], [0.0, 0.5]])
    payload = {"dim_a": 1, "dim_b": 2, "matrix": encode_matrix(m)}
    (tmp_path / "skew.json").write_text(json.dumps(payload))
    with pytest.raises(NotHermitian, match="skew.json"):
        StateStore(tmp_path).load_state("skew")


def _rounded_classical_state() -> dict:
    """diag(1/3, 1/3, 1/3, 0) printed with seven digits; its trace is 0.9999999."""
    m = np.diag([0.3333333, 0.3333333, 0.3333333, 0.0])
    return {"dim_a": 2, "dim_b": 2, "matrix": encode_matrix(m)}


def test_load_state_uses_the_given_trace_tolerance(tmp_path):
    (tmp_path / "rounded.json").write_text(json.dumps(_rounded_classical_state()))
    store = StateStore(tmp_path)
    with pytest.raises(TraceNotOne, match="rounded.json"):
        store.load_state("rounded")

    s = store.load_state("rounded", Tolerances(trace=1e-6))
    assert np.trace(s.rho).real == pytest.approx(0.9999999, abs=1e-12)
