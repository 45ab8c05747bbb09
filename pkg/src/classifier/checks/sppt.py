from src.classifier.checks.base import BaseCheck
from src.classifier.report import FlagEvidence
from src.config import Tolerances
from src.sppt.cholesky import Side
from src.sppt.decision import find_ssppt_frame
from src.states.bipartite import BipartiteState


class SspptCheck(BaseCheck):
    def __init__(self, side: str | Side = Side.UP_TO_B):
        self.side = Side.parse(side)
        self.name = f"ssppt_{self.side.value.lower()}"

    def evaluate(self, s: BipartiteState, tol: Tolerances) -> FlagEvidence:
        report = find_ssppt_frame(s, self.side, tol.commute)
        note = ""
        if report.worst_triple is not None and not report:
            note = f"worst commutator {report.max_commutator:.2e} at {report.worst_triple}"
        elif report.frame is not None:
            note = "holds in the classical-basis frame"
        return self.evidence(report.margin * tol.commute, tol.commute, tol.marginal_factor, note, report)
