from dataclasses import dataclass, fields, replace
from dotenv import load_dotenv
import os
from pathlib import Path
from typing import Any, Mapping

# Load environment variables from .env file
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return float(raw)


# Paths
BASE_DIR = Path(__file__).resolve().parent.parent
STATES_DIR = Path(os.getenv("QCORR_STATES_DIR", BASE_DIR / "data" / "states"))
PROFILES_DIR = Path(os.getenv("QCORR_PROFILES_DIR", BASE_DIR / "profiles"))

MAX_WORKERS = int(os.getenv("QCORR_MAX_WORKERS", "4"))
DEFAULT_SEED = int(os.getenv("QCORR_SEED", "20240601"))


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical slack for every exact condition the criteria test.

    hermitian/positivity are absolute and scaled by the matrix norm where it
    matters; trace bounds |Tr rho - 1| when a state is validated; commute
    covers normality, commutators and factor residuals; weight_gap is the
    relative gap used to cluster eigenvalues and weights.
    A residual above its tolerance but within `marginal_factor` times it is
    reported as numerically marginal.
    """

    hermitian: float = _env_float("QCORR_TOL_HERMITIAN", 1e-9)
    positivity: float = _env_float("QCORR_TOL_POSITIVITY", 1e-9)
    trace: float = _env_float("QCORR_TOL_TRACE", 1e-9)
    commute: float = _env_float("QCORR_TOL_COMMUTE", 1e-8)
    weight_gap: float = _env_float("QCORR_TOL_WEIGHT_GAP", 1e-7)
    marginal_factor: float = _env_float("QCORR_MARGINAL_FACTOR", 10.0)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any] | None) -> "Tolerances":
        """Overlay known keys from a profile or CLI dict on the defaults."""
        base = cls()
        if not values:
            return base
        known = {f.name for f in fields(cls)}
        overrides = {k: float(v) for k, v in values.items() if k in known and v is not None}
        return replace(base, **overrides)

    def scaled(self, factor: float) -> "Tolerances":
        return replace(
            self,
            hermitian=self.hermitian * factor,
            positivity=self.positivity * factor,
            trace=self.trace * factor,
            commute=self.commute * factor,
        )

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOLERANCES = Tolerances()
