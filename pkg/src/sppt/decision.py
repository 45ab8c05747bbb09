"""
SPPT / SSPPT decisions relative to the canonical block Cholesky factor, and
the two-qubit-block (2 (x) n) separability clauses.

A decision can be taken in a local frame (U_A, U_B): the factorization then
runs on (U_A (x) U_B)^dagger rho (U_A (x) U_B). SSPPT is invariant under
local unitaries, so a positive verdict in any frame holds for rho itself.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.config import DEFAULT_TOLERANCES, Tolerances
from src.criteria.structure import is_cq, is_qc
from src.errors import QcorrError, WrongShape
from src.linalg.dense import (
    ComplexMatrix,
    commutator_norm,
    herm_spectrum,
    hs_norm,
    normality_residual,
    operator_norm,
    pseudo_inverse,
    psd_sqrt,
)
from src.sppt.cholesky import (
    BlockCholeskyFactor,
    Side,
    block_cholesky,
    block_transpose,
    block_view,
)
from src.states.bipartite import BipartiteState, conjugate_local, swap_factors, tensor

log = logging.getLogger(__name__)

Frame = tuple[ComplexMatrix, ComplexMatrix]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class SpptReport:
    is_sppt: bool
    residual: float
    off_support: float
    tol: float
    factor: BlockCholeskyFactor

    def __bool__(self) -> bool:
        return self.is_sppt

    @property
    def margin(self) -> float:
        return max(self.residual, self.off_support) / self.tol


@dataclass(frozen=True, eq=False)
class SspptReport:
    is_ssppt: bool
    sppt: SpptReport
    max_commutator: float
    worst_triple: tuple[int, int, int] | None
    tol: float
    frame: Frame | None = None

    def __bool__(self) -> bool:
        return self.is_ssppt

    @property
    def factor(self) -> BlockCholeskyFactor:
        return self.sppt.factor

    @property
    def margin(self) -> float:
        return max(self.sppt.margin, self.max_commutator / self.tol)


@dataclass(frozen=True)
class Corollary1Verdict:
    separable: bool
    clause: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.separable


def in_frame(s: BipartiteState, frame: Frame | None) -> BipartiteState:
    if frame is None:
        return s
    u, v = frame
    return conjugate_local(s, np.asarray(u).conj().T, np.asarray(v).conj().T)


def is_sppt(
    s: BipartiteState,
    side: Side = Side.UP_TO_B,
    tol: float = DEFAULT_TOLERANCES.commute,
    frame: Frame | None = None,
) -> SpptReport:
    """
    rho^T (transpose on the block index) equals Y^dagger Y for the canonical
    factor, and no row of X leaks outside the support of its diagonal block.
    """
    side = Side.parse(side)
    target = in_frame(s, frame)
    factor = block_cholesky(target, side)
    w = block_view(target, side)
    y = factor.assemble_y()
    residual = hs_norm(y.conj().T @ y - block_transpose(w))
    holds = residual <= tol and factor.off_support <= tol
    return SpptReport(holds, residual, factor.off_support, tol, factor)


def ssppt_commutator(factor: BlockCholeskyFactor) -> tuple[float, tuple[int, int, int] | None]:
    """Worst normalized ||[S_ki, S_kj^dagger]|| over k < i <= j."""
    worst, triple = 0.0, None
    m = factor.n_blocks
    for k in range(m):
        for i in range(k + 1, m):
            a = factor.s_blocks[(k, i)]
            for j in range(i, m):
                b = factor.s_blocks[(k, j)]
                if i == j:
                    r = normality_residual(a)
                else:
                    r = commutator_norm(a, b.conj().T) / max(1.0, hs_norm(a) * hs_norm(b))
                if r > worst:
                    worst, triple = r, (k, i, j)
    return worst, triple


def is_ssppt(
    s: BipartiteState,
    side: Side = Side.UP_TO_B,
    tol: float = DEFAULT_TOLERANCES.commute,
    frame: Frame | None = None,
) -> SspptReport:
    sppt = is_sppt(s, side, tol, frame)
    worst, triple = ssppt_commutator(sppt.factor)
    holds = sppt.is_sppt and worst <= tol
    if not holds:
        log.debug("SSPPT up to %s fails: sppt=%s commutator=%.3e at %s", sppt.factor.side.value, sppt.is_sppt, worst, triple)
    return SspptReport(holds, sppt, worst, triple, tol, frame)


def _two_block_view(s: BipartiteState) -> BipartiteState:
    if s.dim_a == 2:
        return s
    if s.dim_b == 2:
        return swap_factors(s)
    raise WrongShape(f"neither factor of a {s.dim_a}x{s.dim_b} system is two-dimensional")


def _contraction_witness(
    r11: ComplexMatrix, r22: ComplexMatrix, r12: ComplexMatrix, tol: Tolerances
) -> tuple[bool, str]:
    """
    With rho_22 <= rho_11 write sqrt(rho_22) = sqrt(rho_11) S and
    rho_12 = sqrt(rho_11) T sqrt(rho_22) for contractions S, T; then
    S_12 = T S^dagger and X_2 = [rho_22 - sqrt(rho_11) S_12^dagger S_12 sqrt(rho_11)]^(1/2).
    The resulting two-row factor is checked before it is trusted.
    """
    try:
        root11 = psd_sqrt(r11, tol.positivity)
        root22 = psd_sqrt(r22, tol.positivity)
        inv11 = pseudo_inverse(root11)
        s = inv11 @ root22
        t = inv11 @ r12 @ pseudo_inverse(root22)
        s12 = t @ s.conj().T
        x2 = psd_sqrt(r22 - root11 @ s12.conj().T @ s12 @ root11, tol.positivity)
    except QcorrError as exc:
        return False, f"witness construction failed: {exc}"

    n = r11.shape[0]
    zero = np.zeros((n, n), dtype=np.complex128)
    x = np.block([[root11, s12 @ root11], [zero, x2]])
    y = np.block([[root11, s12.conj().T @ root11], [zero, x2]])
    rho = np.block([[r11, r12], [r12.conj().T, r22]])
    rho_t = np.block([[r11, r12.conj().T], [r12, r22]])
    scale = max(1.0, hs_norm(rho))
    residual = max(
        hs_norm(x.conj().T @ x - rho),
        hs_norm(y.conj().T @ y - rho_t),
    ) / scale
    normal = normality_residual(s12)
    contraction = max(operator_norm(s), operator_norm(t))
    detail = f"residual {residual:.2e}, normality {normal:.2e}, contraction norm {contraction:.3f}"
    ok = residual <= tol.commute and normal <= tol.commute and contraction <= 1 + 1e-6
    return ok, detail


def corollary1_separability(
    s: BipartiteState,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Corollary1Verdict:
    """
    Sufficient separability tests for 2 (x) n (or n (x) 2) states:
    (i) canonical SPPT with an invertible leading block, (ii) ordered
    diagonal blocks with a verified contraction witness. Both are tried for
    the two orderings of the qubit basis.
    """
    base = _two_block_view(s)
    flipped = conjugate_local(base, SIGMA_X, np.eye(base.dim_b))
    for label, view in (("", base), (" (qubit basis flipped)", flipped)):
        if herm_spectrum(tensor(view)[0, :, 0, :])[0] > tol.positivity:
            if is_sppt(view, Side.UP_TO_B, tol.commute):
                return Corollary1Verdict(True, "i", "canonical SPPT with invertible rho_11" + label)

    details = []
    for label, view in (("", base), (" (qubit basis flipped)", flipped)):
        w = tensor(view)
        r11, r22, r12 = w[0, :, 0, :], w[1, :, 1, :], w[0, :, 1, :]
        if herm_spectrum(r11 - r22)[0] >= -tol.positivity:
            ok, detail = _contraction_witness(r11, r22, r12, tol)
            if ok:
                return Corollary1Verdict(True, "ii", "rho_11 >= rho_22, " + detail + label)
            details.append(detail + label)

    return Corollary1Verdict(False, None, "; ".join(details) or "no clause applies")


def candidate_frames(s: BipartiteState, tol: float = DEFAULT_TOLERANCES.commute) -> list[tuple[str, Frame | None]]:
    """
    Local frames worth trying before giving up on SSPPT: the given basis,
    then the classical basis of A and of B when the state is CQ or QC.
    """
    frames: list[tuple[str, Frame | None]] = [("identity", None)]
    cq = is_cq(s, tol)
    if cq and cq.basis is not None:
        frames.append(("cq basis", (cq.basis, np.eye(s.dim_b, dtype=np.complex128))))
    qc = is_qc(s, tol)
    if qc and qc.basis is not None:
        frames.append(("qc basis", (np.eye(s.dim_a, dtype=np.complex128), qc.basis)))
    return frames


def find_ssppt_frame(
    s: BipartiteState,
    side: Side = Side.UP_TO_B,
    tol: float = DEFAULT_TOLERANCES.commute,
) -> SspptReport:
    """The report with the smallest margin over `candidate_frames`, earlier frames winning ties."""
    side = Side.parse(side)
    best = None
    for name, frame in candidate_frames(s, tol):
        report = is_ssppt(s, side, tol, frame)
        if best is None or report.margin < best.margin:
            best = report
            log.debug("SSPPT up to %s: %s frame margin %.3e", side.value, name, report.margin)
    return best
