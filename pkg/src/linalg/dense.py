"""
Dense complex matrix kernel.

Matrices are numpy complex128 arrays. The Hermitian eigensolver is a cyclic
Jacobi iteration with a fixed tie-breaking rule, so eigenvectors are
reproducible for a given input; value-only spectra inside hot loops go
through LAPACK (`herm_spectrum`).
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.errors import (
    NoConvergence,
    NonSquare,
    NotHermitian,
    NotPSD,
    ShapeMismatch,
    ValidationError,
)

log = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-9
MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-13
DEGENERACY_GAP = 1e-9
PIVOT_THRESHOLD = 1e-6
DEFAULT_RANK_TOL = 1e-7


@dataclass(frozen=True)
class HermEigen:
    values: npt.NDArray[np.float64]
    vectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(m) -> ComplexMatrix:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def _require_square(a: ComplexMatrix) -> None:
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"matrix of shape {a.shape} is not square")


def hs_norm(m) -> float:
    """Hilbert-Schmidt norm [Tr(M^dagger M)]^(1/2)."""
    return float(np.linalg.norm(np.asarray(m), "fro"))


def trace_norm(m) -> float:
    a = as_matrix(m)
    _require_square(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False).sum())


def operator_norm(m) -> float:
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def kron(a, b) -> ComplexMatrix:
    """Tensor product, first factor major: (|i> x |k>) has index i*dim_b + k."""
    return np.kron(as_matrix(a), as_matrix(b))


def hermiticity_residual(m) -> float:
    a = np.asarray(m)
    return hs_norm(a - a.conj().T)


def hermitian_part(m) -> ComplexMatrix:
    a = np.asarray(m, dtype=np.complex128)
    return (a + a.conj().T) / 2


def _check_hermitian(a: ComplexMatrix, tol: float) -> None:
    residual = hermiticity_residual(a)
    if residual > tol * max(1.0, hs_norm(a)):
        raise NotHermitian(f"Hermiticity residual {residual:.3e} exceeds tolerance")


def _off_diagonal_mass(a: ComplexMatrix) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: ComplexMatrix, v: ComplexMatrix, p: int, q: int) -> None:
    apq = a[p, q]
    mag = abs(apq)
    if mag < 1e-300:
        return
    phase = np.conj(apq / mag)
    theta = 0.5 * np.arctan2(2.0 * mag, a[q, q].real - a[p, p].real)
    c, s = np.cos(theta), np.sin(theta)
    g = np.array([[c, s], [-s * phase, c * phase]], dtype=np.complex128)

    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


def _canonical_subspace_basis(vc: ComplexMatrix) -> ComplexMatrix:
    """
    Orthonormal basis of span(vc) obtained by projecting the canonical basis
    vectors e_0, e_1, ... in order and keeping those with a non-negligible
    remainder. The pivot component of every kept vector is real positive.
    """
    n, m = vc.shape
    proj = vc @ vc.conj().T
    chosen: list[np.ndarray] = []
    for i in range(n):
        w = proj[:, i].copy()
        for u in chosen:
            w -= u * (u.conj() @ w)
        for u in chosen:
            w -= u * (u.conj() @ w)
        nrm = np.linalg.norm(w)
        if nrm > PIVOT_THRESHOLD:
            chosen.append(w / nrm)
        if len(chosen) == m:
            break
    return np.column_stack(chosen)


def _fix_phase(col: np.ndarray) -> np.ndarray:
    mags = np.abs(col)
    pivot = int(np.argmax(mags >= mags.max() * (1 - 1e-8)))
    return col * (abs(col[pivot]) / col[pivot])


def herm_eig(h, tol: float = HERMITIAN_TOL) -> HermEigen:
    """
    Full spectral decomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Eigenvalues come back ascending. Inside a numerically degenerate cluster
    (gap below 1e-9 of the spectral radius) the eigenvectors are replaced by
    the ordered projection of the canonical basis onto the eigenspace; every
    other eigenvector has its largest component made real positive.
    """
    a = as_matrix(h)
    _require_square(a)
    _check_hermitian(a, tol)
    n = a.shape[0]
    if n == 0:
        return HermEigen(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))

    a = hermitian_part(a)
    v = np.eye(n, dtype=np.complex128)
    threshold = OFFDIAG_TOL * hs_norm(a)

    sweeps = 0
    while _off_diagonal_mass(a) > threshold:
        if sweeps == MAX_SWEEPS:
            raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
        sweeps += 1

    values = a.diagonal().real.copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    v = v[:, order]

    gap = DEGENERACY_GAP * max(float(np.max(np.abs(values))), 1e-300)
    start = 0
    for stop in range(1, n + 1):
        if stop < n and values[stop] - values[stop - 1] <= gap:
            continue
        if stop - start > 1:
            v[:, start:stop] = _canonical_subspace_basis(v[:, start:stop])
        else:
            v[:, start] = _fix_phase(v[:, start])
        start = stop

    return HermEigen(values, v)


def herm_spectrum(h) -> npt.NDArray[np.float64]:
    """Ascending eigenvalues of the Hermitian part of h (LAPACK)."""
    a = np.asarray(h, dtype=np.complex128)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(hermitian_part(a))


def is_normal(m, tol: float = 1e-8) -> bool:
    return normality_residual(m) <= tol


def normality_residual(m) -> float:
    """||M M^dagger - M^dagger M|| relative to max(1, ||M||^2)."""
    a = as_matrix(m)
    _require_square(a)
    raw = hs_norm(a @ a.conj().T - a.conj().T @ a)
    return raw / max(1.0, hs_norm(a) ** 2)


def commutator_norm(a, b) -> float:
    x, y = as_matrix(a), as_matrix(b)
    _require_square(x)
    _require_square(y)
    if x.shape != y.shape:
        raise ShapeMismatch(f"cannot commute {x.shape} with {y.shape}")
    return hs_norm(x @ y - y @ x)


def psd_sqrt(p, tol: float = HERMITIAN_TOL) -> ComplexMatrix:
    eig = herm_eig(p, tol)
    if eig.values.size == 0:
        return eig.vectors
    scale = max(1.0, float(np.max(np.abs(eig.values))))
    if eig.values[0] < -tol * scale:
        raise NotPSD(f"eigenvalue {eig.values[0]:.3e} below -{tol:g}")
    root = (eig.vectors * np.sqrt(np.clip(eig.values, 0.0, None))) @ eig.vectors.conj().T
    return hermitian_part(root)


def pseudo_inverse(m, rank_tol: float = DEFAULT_RANK_TOL) -> ComplexMatrix:
    """
    Moore-Penrose pseudoinverse through the spectral decomposition of M^dagger M.

    Singular values below rank_tol times the largest one count as zero. The
    default sits above sqrt(machine epsilon) because singular values are
    recovered from squared data.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if a.size == 0:
        return np.zeros((cols, rows), dtype=np.complex128)
    eig = herm_eig(a.conj().T @ a, tol=1e-6)
    sv = np.sqrt(np.clip(eig.values, 0.0, None))
    smax = float(sv.max())
    if smax == 0.0:
        return np.zeros((cols, rows), dtype=np.complex128)
    keep = sv > rank_tol * smax
    basis = eig.vectors[:, keep]
    gram_inv = (basis / eig.values[keep]) @ basis.conj().T
    return gram_inv @ a.conj().T


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
