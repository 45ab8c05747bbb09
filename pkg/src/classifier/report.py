"""Classification report: tri-state flags, separability verdict, optional measures."""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from src.sppt.ensemble import SeparableEnsemble

FLAG_NAMES = ("product", "zero_min_a", "zero_min_b", "cq", "qc", "ssppt_a", "ssppt_b", "ppt")


class Flag(str, Enum):
    YES = "yes"
    NO = "no"
    MARGINAL = "marginal"

    @classmethod
    def from_margin(cls, margin: float, factor: float) -> "Flag":
        """margin is residual / tol; the marginal band is (tol, factor * tol]."""
        # at or inside tol: passes
        if margin <= 1.0:
            return cls.YES
        # beyond factor * tol: clear failure
        if margin > factor:
            return cls.NO
        return cls.MARGINAL


@dataclass
class FlagEvidence:
    flag: Flag
    residual: float
    tol: float
    note: str = ""
    payload: Any = field(default=None, repr=False)

    @property
    def margin(self) -> float:
        return self.residual / self.tol if self.tol > 0 else float("inf")

    def to_dict(self) -> dict:
        out = {"flag": self.flag.value, "residual": self.residual, "tol": self.tol}
        if self.note:
            out["note"] = self.note
        return out


class Verdict(str, Enum):
    SEPARABLE = "Separable"
    ENTANGLED = "Entangled"
    UNKNOWN = "Unknown"


class Reason(str, Enum):
    PURE_PPT = "PurePPT"
    SSPPT = "SSPPT-Thm1"
    COROLLARY1 = "Corollary1"
    PPT_SMALL_DIMS = "PPT-small-dims"
    NPT = "NPT"
    PURE_NON_PPT = "PureNonPPT"


@dataclass(frozen=True)
class Separability:
    verdict: Verdict
    reason: Reason | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason.value if self.reason else None,
            "detail": self.detail,
        }


@dataclass
class ClassificationReport:
    dim_a: int
    dim_b: int
    flags: dict[str, FlagEvidence]
    separability: Separability
    measures: dict[str, dict] = field(default_factory=dict)
    ensemble: SeparableEnsemble | None = None
    warnings: list[str] = field(default_factory=list)
    chain_downgrades: int = 0
    hard_violations: int = 0

    def flag(self, name: str) -> Flag:
        return self.flags[name].flag

    def to_dict(self) -> dict:
        out = {
            "dim_a": self.dim_a,
            "dim_b": self.dim_b,
            "flags": {name: self.flags[name].flag.value for name in FLAG_NAMES},
            "separability": self.separability.to_dict(),
            "evidence": {name: self.flags[name].to_dict() for name in FLAG_NAMES},
            "measures": self.measures,
            "warnings": list(self.warnings),
            "chain_downgrades": self.chain_downgrades,
            "hard_violations": self.hard_violations,
        }
        if self.ensemble is not None:
            out["ensemble"] = {
                "terms": len(self.ensemble),
                "weight_sum": self.ensemble.weight_sum,
                "residual": self.ensemble.residual,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_row(self, file: str) -> dict:
        row = {"file": file, "dim_a": self.dim_a, "dim_b": self.dim_b}
        row.update({name: self.flags[name].flag.value for name in FLAG_NAMES})
        row["separability"] = self.separability.verdict.value
        row["reason"] = self.separability.reason.value if self.separability.reason else ""
        return row
