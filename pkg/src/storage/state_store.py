import json
from pathlib import Path

import numpy as np

from src.config import DEFAULT_TOLERANCES, STATES_DIR, Tolerances
from src.errors import QcorrError, StateFileError
from src.sppt.ensemble import EnsembleTerm, SeparableEnsemble
from src.states.bipartite import BipartiteState, new_bipartite


def encode_matrix(m) -> list:
    """[[[re, im], ...], ...]; json writes floats with round-trip precision."""
    a = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise StateFileError(f"matrix entries are not [re, im] pairs: {e}") from e
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise StateFileError(f"matrix payload has shape {arr.shape}, expected (n, n, 2)")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(s: BipartiteState) -> dict:
    return {"dim_a": s.dim_a, "dim_b": s.dim_b, "matrix": encode_matrix(s.rho)}


def state_from_dict(payload: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> BipartiteState:
    try:
        dim_a, dim_b = int(payload["dim_a"]), int(payload["dim_b"])
        matrix = decode_matrix(payload["matrix"])
    except (KeyError, TypeError) as e:
        raise StateFileError(f"state file is missing a field: {e}") from e
    return new_bipartite(matrix, dim_a, dim_b, tol)


def ensemble_to_dict(ensemble: SeparableEnsemble) -> dict:
    return {
        "dim_a": ensemble.dim_a,
        "dim_b": ensemble.dim_b,
        "residual": ensemble.residual,
        "terms": [{"p": t.p, "a": encode_matrix(t.a), "b": encode_matrix(t.b)} for t in ensemble.terms],
    }


def ensemble_from_dict(payload: dict) -> SeparableEnsemble:
    try:
        terms = tuple(
            EnsembleTerm(float(t["p"]), decode_matrix(t["a"]), decode_matrix(t["b"]))
            for t in payload["terms"]
        )
    except (KeyError, TypeError) as e:
        raise StateFileError(f"ensemble file is malformed: {e}") from e
    if not terms:
        raise StateFileError("ensemble has no terms")
    dim_a = int(payload.get("dim_a", terms[0].a.shape[0]))
    dim_b = int(payload.get("dim_b", terms[0].b.shape[0]))
    return SeparableEnsemble(dim_a, dim_b, terms, float(payload.get("residual", 0.0)))


class StateStore:
    def __init__(self, data_dir: Path = STATES_DIR):
        self.data_dir = Path(data_dir)

    def get_file_path(self, name: str | Path) -> Path:
        """
        Existing files and paths with a directory part are used as given; other
        bare names live in the store directory.
        """
        path = Path(name)
        if path.exists():
            return path
        if not path.suffix:
            path = path.with_suffix(".json")
        if len(path.parts) == 1:
            path = self.data_dir / path
        return path

    def _write(self, path: Path, payload: dict) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    def _read(self, name: str | Path) -> dict:
        path = self.get_file_path(name)
        if not path.exists():
            raise StateFileError(f"{path} not found")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise StateFileError(f"{path} is not valid JSON: {e}") from e

    def save_state(self, s: BipartiteState, name: str | Path) -> Path:
        return self._write(self.get_file_path(name), state_to_dict(s))

    def load_state(self, name: str | Path, tol: Tolerances = DEFAULT_TOLERANCES) -> BipartiteState:
        """Read and validate a state; `tol` sets the Hermiticity, positivity and trace slack."""
        payload = self._read(name)
        try:
            return state_from_dict(payload, tol)
        except StateFileError:
            raise
        except QcorrError as e:
            raise type(e)(f"{self.get_file_path(name)}: {e}") from e

    def save_ensemble(self, ensemble: SeparableEnsemble, name: str | Path) -> Path:
        return self._write(self.get_file_path(name), ensemble_to_dict(ensemble))

    def load_ensemble(self, name: str | Path) -> SeparableEnsemble:
        return ensemble_from_dict(self._read(name))

    def exists(self, name: str | Path) -> bool:
        return self.get_file_path(name).exists()

    def list_states(self, directory: Path | None = None) -> list[Path]:
        root = Path(directory) if directory is not None else self.data_dir
        return sorted(root.glob("*.json"))
