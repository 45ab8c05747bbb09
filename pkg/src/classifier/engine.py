"""
Runs every structural check on a state, reconciles the flags with the
inclusion chain product => zero-MiN => CQ/QC => SSPPT => PPT and picks the
separability verdict from the first sufficient rule that fires.
"""

import logging
from typing import Iterable, List

from src.classifier.checks.base import BaseCheck
from src.classifier.checks.sppt import SspptCheck
from src.classifier.checks.structure import ClassicalSideCheck, PptCheck, ProductCheck, ZeroMinCheck
from src.classifier.report import (
    ClassificationReport,
    Flag,
    FlagEvidence,
    Reason,
    Separability,
    Verdict,
)
from src.config import DEFAULT_TOLERANCES, Tolerances
from src.errors import NumericalError, QcorrError
from src.measures.correlations import MAX_DISCORD_DIM, MEASURES, MeasureOptions
from src.sppt.cholesky import Side
from src.sppt.decision import corollary1_separability
from src.sppt.ensemble import SeparableEnsemble, extract_separable_ensemble
from src.states.bipartite import BipartiteState, is_pure

log = logging.getLogger(__name__)

IMPLIES = {
    "product": ("zero_min_a", "zero_min_b"),
    "zero_min_a": ("cq",),
    "zero_min_b": ("qc",),
    "cq": ("ssppt_a", "ssppt_b"),
    "qc": ("ssppt_a", "ssppt_b"),
    "ssppt_a": ("ppt",),
    "ssppt_b": ("ppt",),
}
SMALL_DIMS = {(2, 2), (2, 3), (3, 2)}


def chain_pairs() -> list[tuple[str, str]]:
    """Every (stricter, weaker) pair of the transitive closure of IMPLIES."""
    pairs = []
    for start in IMPLIES:
        seen, stack = set(), list(IMPLIES[start])
        while stack:
            nxt = stack.pop()
            if nxt in seen:
                continue
            seen.add(nxt)
            pairs.append((start, nxt))
            stack.extend(IMPLIES.get(nxt, ()))
    return pairs


def default_checks() -> List[BaseCheck]:
    return [
        ProductCheck(),
        ZeroMinCheck("A"),
        ZeroMinCheck("B"),
        ClassicalSideCheck("A"),
        ClassicalSideCheck("B"),
        SspptCheck(Side.UP_TO_A),
        SspptCheck(Side.UP_TO_B),
        PptCheck(),
    ]


class ClassifierEngine:
    def __init__(self, tol: Tolerances = DEFAULT_TOLERANCES, checks: Iterable[BaseCheck] | None = None):
        self.tol = tol
        self.checks = list(checks) if checks is not None else default_checks()

    def run_checks(self, s: BipartiteState, warnings: list[str]) -> dict[str, FlagEvidence]:
        flags = {}
        for check in self.checks:
            try:
                flags[check.name] = check.evaluate(s, self.tol)
            except NumericalError as e:
                message = f"{check.name}: numerical failure ({e}); flag set to marginal"
                log.warning(message)
                warnings.append(message)
                flags[check.name] = FlagEvidence(
                    Flag.MARGINAL, self.tol.commute * self.tol.marginal_factor, self.tol.commute, str(e)
                )
        return flags

    def enforce_chain(self, flags: dict[str, FlagEvidence], warnings: list[str]) -> tuple[int, int]:
        """
        A clear yes on a stricter class with a clear no on a weaker one is
        inconsistent; the stricter flag is downgraded to marginal. The
        violation is hard when both residuals sit a full band away from
        their tolerances.
        """
        factor = self.tol.marginal_factor
        downgrades = hard = 0
        for stricter, weaker in chain_pairs():
            if stricter not in flags or weaker not in flags:
                continue
            x, y = flags[stricter], flags[weaker]
            if x.flag is not Flag.YES or y.flag is not Flag.NO:
                continue
            x.flag = Flag.MARGINAL
            downgrades += 1
            if x.margin <= 1.0 / factor**2 and y.margin > factor**2:
                hard += 1
                message = f"hard chain violation: {stricter}=yes but {weaker}=no"
            else:
                message = f"{stricter} downgraded to marginal: {weaker}=no"
            log.warning(message)
            warnings.append(message)
        return downgrades, hard

    def separability(
        self,
        s: BipartiteState,
        flags: dict[str, FlagEvidence],
        warnings: list[str],
        want_ensemble: bool = False,
    ) -> tuple[Separability, SeparableEnsemble | None]:
        ppt = flags["ppt"].flag
        pure = is_pure(s)
        if ppt is Flag.NO:
            reason = Reason.PURE_NON_PPT if pure else Reason.NPT
            return Separability(Verdict.ENTANGLED, reason, flags["ppt"].note), None
        if pure and ppt is Flag.YES:
            return Separability(Verdict.SEPARABLE, Reason.PURE_PPT), None

        for name in ("ssppt_b", "ssppt_a"):
            evidence = flags[name]
            if evidence.flag is not Flag.YES:
                continue
            side = Side.UP_TO_B if name == "ssppt_b" else Side.UP_TO_A
            ensemble = None
            if want_ensemble:
                report = evidence.payload
                try:
                    ensemble = extract_separable_ensemble(s, side, self.tol.commute, report.frame)
                except QcorrError as e:
                    warnings.append(f"ensemble extraction up to {side.value} failed: {e}")
            return Separability(Verdict.SEPARABLE, Reason.SSPPT, f"up to {side.value}"), ensemble

        if ppt is Flag.YES and s.dims in SMALL_DIMS:
            return Separability(Verdict.SEPARABLE, Reason.PPT_SMALL_DIMS), None

        if 2 in s.dims:
            try:
                verdict = corollary1_separability(s, self.tol)
                if verdict:
                    return Separability(Verdict.SEPARABLE, Reason.COROLLARY1, verdict.detail), None
            except QcorrError as e:
                warnings.append(f"two-block criterion failed: {e}")

        return Separability(Verdict.UNKNOWN), None

    def measures(self, s: BipartiteState, opts: MeasureOptions, warnings: list[str]) -> dict[str, dict]:
        out = {}
        for name, fn in MEASURES.items():
            measured_dim = s.dim_a if name.endswith("-a") else s.dim_b
            if name.startswith("discord") and measured_dim > MAX_DISCORD_DIM:
                continue
            try:
                out[name] = fn(s, opts).to_dict()
            except QcorrError as e:
                warnings.append(f"{name}: {e}")
        return out

    def classify(
        self,
        s: BipartiteState,
        with_measures: bool = False,
        with_ensemble: bool = False,
        measure_opts: MeasureOptions | None = None,
    ) -> ClassificationReport:
        warnings: list[str] = []
        flags = self.run_checks(s, warnings)
        downgrades, hard = self.enforce_chain(flags, warnings)
        separability, ensemble = self.separability(s, flags, warnings, with_ensemble)
        measures = {}
        if with_measures:
            measures = self.measures(s, measure_opts or MeasureOptions(tol=self.tol), warnings)
        log.debug("classified %dx%d state: %s", s.dim_a, s.dim_b, separability.verdict.value)
        return ClassificationReport(
            s.dim_a, s.dim_b, flags, separability, measures, ensemble, warnings, downgrades, hard
        )


def classify(
    s: BipartiteState,
    tol: Tolerances = DEFAULT_TOLERANCES,
    with_measures: bool = False,
    with_ensemble: bool = False,
    measure_opts: MeasureOptions | None = None,
) -> ClassificationReport:
    return ClassifierEngine(tol).classify(s, with_measures, with_ensemble, measure_opts)
