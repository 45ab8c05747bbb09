"""
Canonical block Cholesky factorization rho = X^dagger X.

The state is read as an m x m matrix of n x n blocks. For side UP_TO_B the
block index is the A index (blocks B_kl act on H_B); for UP_TO_A the factors
are swapped first so the blocks A_ij act on H_A. Row k of X is
[0 ... 0, X_k, R_k,k+1, ..., R_k,m-1] with X_k the PSD square root of the
current Schur complement block and R_kl = X_k^+ rho'_kl = S_kl X_k.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.config import DEFAULT_TOLERANCES
from src.errors import NotPSDResidual, ReconstructionFailed, ShapeMismatch, ValidationError
from src.linalg.dense import ComplexMatrix, as_matrix, herm_eig, hermitian_part, hs_norm
from src.states.bipartite import BipartiteState, swap_factors, tensor

log = logging.getLogger(__name__)

RECONSTRUCTION_TOL = 1e-8
LEAK_FACTOR = 10.0
KERNEL_TOL = 1e-10


class Side(str, Enum):
    UP_TO_A = "A"
    UP_TO_B = "B"

    @classmethod
    def parse(cls, value: "str | Side") -> "Side":
        if isinstance(value, Side):
            return value
        key = value.strip().upper()
        if key in ("A", "UP_TO_A", "UPTOA"):
            return cls.UP_TO_A
        if key in ("B", "UP_TO_B", "UPTOB"):
            return cls.UP_TO_B
        raise ValidationError(f"unknown side {value!r}; use 'a' or 'b'")


@dataclass(frozen=True, eq=False)
class BlockCholeskyFactor:
    side: Side
    block_dim: int
    x_blocks: tuple[ComplexMatrix, ...]
    row_blocks: dict[tuple[int, int], ComplexMatrix]
    s_blocks: dict[tuple[int, int], ComplexMatrix]
    support_ranks: tuple[int, ...]
    off_support: float = 0.0
    off_support_rows: tuple[float, ...] = field(default=())

    @property
    def n_blocks(self) -> int:
        return len(self.x_blocks)

    def _assemble(self, adjoint_s: bool) -> ComplexMatrix:
        m, n = self.n_blocks, self.block_dim
        x = np.zeros((m * n, m * n), dtype=np.complex128)
        for k, xk in enumerate(self.x_blocks):
            x[k * n : (k + 1) * n, k * n : (k + 1) * n] = xk
            for l in range(k + 1, m):
                if adjoint_s:
                    entry = self.s_blocks[(k, l)].conj().T @ xk
                else:
                    entry = self.row_blocks[(k, l)]
                x[k * n : (k + 1) * n, l * n : (l + 1) * n] = entry
        return x

    def assemble_x(self) -> ComplexMatrix:
        return self._assemble(adjoint_s=False)

    def assemble_y(self) -> ComplexMatrix:
        """X with every S_kl replaced by S_kl^dagger."""
        return self._assemble(adjoint_s=True)

    def gram(self) -> ComplexMatrix:
        x = self.assemble_x()
        return x.conj().T @ x

    @classmethod
    def from_upper(cls, x, block_dim: int, side: Side = Side.UP_TO_B) -> "BlockCholeskyFactor":
        """
        Wrap an arbitrary block upper-triangular factor with Hermitian PSD
        diagonal blocks; S_kl is read off as R_kl X_k^+.
        """
        x = as_matrix(x)
        size = x.shape[0]
        if x.shape != (size, size) or size % block_dim:
            raise ShapeMismatch(f"factor of shape {x.shape} is not made of {block_dim}x{block_dim} blocks")
        m = size // block_dim
        xs, rows, ss, ranks = [], {}, {}, []
        for k in range(m):
            sl = slice(k * block_dim, (k + 1) * block_dim)
            xk = hermitian_part(x[sl, sl])
            pinv, proj, rank = _support_inverse(xk)
            xs.append(xk)
            ranks.append(rank)
            for l in range(k + 1, m):
                r = x[sl, l * block_dim : (l + 1) * block_dim].copy()
                rows[(k, l)] = r
                ss[(k, l)] = r @ pinv
        return cls(side, block_dim, tuple(xs), rows, ss, tuple(ranks))


def _support_inverse(xk: ComplexMatrix) -> tuple[ComplexMatrix, ComplexMatrix, int]:
    """Pseudoinverse and range projector of a Hermitian PSD diagonal block."""
    eig = herm_eig(xk, tol=1e-6)
    scale = max(1.0, float(np.max(np.abs(eig.values)))) if eig.values.size else 1.0
    keep = eig.values > KERNEL_TOL * scale
    vs = eig.vectors[:, keep]
    pinv = (vs / eig.values[keep]) @ vs.conj().T
    return pinv, vs @ vs.conj().T, int(keep.sum())


def block_view(s: BipartiteState, side: Side) -> np.ndarray:
    """4-index array w[k, :, l, :] holding the blocks the factorization runs over."""
    side = Side.parse(side)
    source = s if side is Side.UP_TO_B else swap_factors(s)
    return tensor(source).copy()


def block_transpose(w: np.ndarray) -> ComplexMatrix:
    m, n = w.shape[0], w.shape[1]
    return w.transpose(2, 1, 0, 3).reshape(m * n, m * n)


def factor_blocks(w: np.ndarray, side: Side, tol: float) -> BlockCholeskyFactor:
    """Schur-complement recursion over the block rows of a PSD block array."""
    m, n = w.shape[0], w.shape[1]
    work = np.array(w, dtype=np.complex128, copy=True)
    scale = max(1.0, hs_norm(work.reshape(m * n, m * n)))
    leak_limit = LEAK_FACTOR * np.sqrt(tol * scale)

    xs, rows, ss, ranks, offs = [], {}, {}, [], []
    for k in range(m):
        eig = herm_eig(hermitian_part(work[k, :, k, :]), tol=1e-6)
        if eig.values[0] < -tol * scale:
            raise NotPSDResidual(f"Schur complement block {k} has eigenvalue {eig.values[0]:.3e}")
        support = eig.values > tol * scale
        lam = np.where(support, np.clip(eig.values, 0.0, None), 0.0)
        root = hermitian_part((eig.vectors * np.sqrt(lam)) @ eig.vectors.conj().T)
        vs = eig.vectors[:, support]
        pinv = (vs / np.sqrt(lam[support])) @ vs.conj().T
        proj = vs @ vs.conj().T

        xs.append(root)
        ranks.append(int(support.sum()))
        row_off = 0.0
        for l in range(k + 1, m):
            block = work[k, :, l, :]
            leak = hs_norm(block - proj @ block)
            if leak > leak_limit:
                raise NotPSDResidual(
                    f"block ({k}, {l}) carries {leak:.3e} outside the range of X_{k}"
                )
            r = pinv @ block
            rows[(k, l)] = r
            ss[(k, l)] = r @ pinv
            row_off = max(row_off, hs_norm(r - r @ proj))
        offs.append(row_off)

        for l in range(k + 1, m):
            for l2 in range(k + 1, m):
                work[l, :, l2, :] -= rows[(k, l)].conj().T @ rows[(k, l2)]

    log.debug("block Cholesky (%s): support ranks %s", side.value, ranks)
    return BlockCholeskyFactor(
        side, n, tuple(xs), rows, ss, tuple(ranks), max(offs, default=0.0), tuple(offs)
    )


def _check_reconstruction(factor: BlockCholeskyFactor, target: ComplexMatrix) -> None:
    residual = hs_norm(factor.gram() - target)
    if residual > RECONSTRUCTION_TOL * max(1.0, hs_norm(target)):
        raise ReconstructionFailed(f"X^dagger X misses the target by {residual:.3e}")


def block_cholesky(
    s: BipartiteState,
    side: Side = Side.UP_TO_B,
    tol: float = DEFAULT_TOLERANCES.positivity,
) -> BlockCholeskyFactor:
    side = Side.parse(side)
    w = block_view(s, side)
    factor = factor_blocks(w, side, tol)
    m, n = w.shape[0], w.shape[1]
    _check_reconstruction(factor, w.reshape(m * n, m * n))
    return factor


def lemma1_normalize(
    factor: BlockCholeskyFactor,
    tol: float = DEFAULT_TOLERANCES.positivity,
) -> BlockCholeskyFactor:
    """
    Equivalent factor in which a row carries no weight along directions
    outside the support of its diagonal block.

    The first offending row is projected onto the support of X_k; the part
    removed from it is folded into the Gram matrix of the rows below, which
    is then refactored canonically.
    """
    m, n = factor.n_blocks, factor.block_dim
    target = factor.gram()
    xs = list(factor.x_blocks)
    rows = dict(factor.row_blocks)
    ss = dict(factor.s_blocks)
    ranks = list(factor.support_ranks)

    for k in range(m):
        pinv, proj, rank = _support_inverse(xs[k])
        comp = np.eye(n) - proj
        leftovers = {l: comp @ rows[(k, l)] for l in range(k + 1, m)}
        if all(hs_norm(v) <= KERNEL_TOL for v in leftovers.values()):
            continue

        xs[k] = hermitian_part(proj @ xs[k] @ proj)
        for l in range(k + 1, m):
            rows[(k, l)] = proj @ rows[(k, l)]
            ss[(k, l)] = rows[(k, l)] @ pinv

        trailing = np.zeros((m - k - 1, n, m - k - 1, n), dtype=np.complex128)
        for j in range(k + 1, m):
            row = {j: xs[j], **{l: rows[(j, l)] for l in range(j + 1, m)}}
            for l, a in row.items():
                for l2, b in row.items():
                    trailing[l - k - 1, :, l2 - k - 1, :] += a.conj().T @ b
        for l, a in leftovers.items():
            for l2, b in leftovers.items():
                trailing[l - k - 1, :, l2 - k - 1, :] += a.conj().T @ b

        tail = factor_blocks(trailing, factor.side, tol)
        for j in range(k + 1, m):
            xs[j] = tail.x_blocks[j - k - 1]
            ranks[j] = tail.support_ranks[j - k - 1]
            for l in range(j + 1, m):
                rows[(j, l)] = tail.row_blocks[(j - k - 1, l - k - 1)]
                ss[(j, l)] = tail.s_blocks[(j - k - 1, l - k - 1)]
        ranks[k] = rank
        log.debug("row %d normalized, rows below refactored", k)
        break

    normalized = BlockCholeskyFactor(factor.side, n, tuple(xs), rows, ss, tuple(ranks))
    _check_reconstruction(normalized, target)
    return normalized
