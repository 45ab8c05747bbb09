from abc import ABC, abstractmethod

from src.classifier.report import Flag, FlagEvidence
from src.config import Tolerances
from src.states.bipartite import BipartiteState


class BaseCheck(ABC):
    name: str = ""

    @abstractmethod
    def evaluate(self, s: BipartiteState, tol: Tolerances) -> FlagEvidence:
        """
        Decide one flag of the report. The evidence carries the residual that
        drove the decision and the tolerance it was measured against.
        """
        pass

    @staticmethod
    def evidence(residual: float, tol: float, factor: float, note: str = "", payload=None) -> FlagEvidence:
        margin = residual / tol if tol > 0 else float("inf")
        return FlagEvidence(Flag.from_margin(margin, factor), residual, tol, note, payload)
