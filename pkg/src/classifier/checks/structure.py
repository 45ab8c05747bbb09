from src.classifier.checks.base import BaseCheck
from src.classifier.report import FlagEvidence
from src.config import Tolerances
from src.criteria.structure import is_cq, is_ppt, is_product, is_qc, is_zero_min_a, is_zero_min_b
from src.states.bipartite import BipartiteState


class ProductCheck(BaseCheck):
    name = "product"

    def evaluate(self, s: BipartiteState, tol: Tolerances) -> FlagEvidence:
        verdict = is_product(s, tol.commute)
        return self.evidence(verdict.residual, tol.commute, tol.marginal_factor)


class ZeroMinCheck(BaseCheck):
    def __init__(self, side: str = "A"):
        self.side = side.upper()
        self.name = f"zero_min_{self.side.lower()}"

    def evaluate(self, s: BipartiteState, tol: Tolerances) -> FlagEvidence:
        check = is_zero_min_a if self.side == "A" else is_zero_min_b
        witness = check(s, tol.commute, tol.weight_gap)
        note = f"violating pair {witness.violating_pair}" if witness.violating_pair else ""
        return self.evidence(witness.margin * tol.commute, tol.commute, tol.marginal_factor, note, witness)


class ClassicalSideCheck(BaseCheck):
    """CQ when the classical side is A, QC when it is B."""

    def __init__(self, side: str = "A"):
        self.side = side.upper()
        self.name = "cq" if self.side == "A" else "qc"

    def evaluate(self, s: BipartiteState, tol: Tolerances) -> FlagEvidence:
        check = is_cq if self.side == "A" else is_qc
        witness = check(s, tol.commute)
        return self.evidence(witness.max_violation, tol.commute, tol.marginal_factor, payload=witness)


class PptCheck(BaseCheck):
    name = "ppt"

    def evaluate(self, s: BipartiteState, tol: Tolerances) -> FlagEvidence:
        result = is_ppt(s, tol.positivity)
        note = f"min eigenvalue {result.min_eigenvalue:.3e}"
        return self.evidence(result.residual, tol.positivity, tol.marginal_factor, note, result)
