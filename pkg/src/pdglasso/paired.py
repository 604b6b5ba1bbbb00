"""Paired-variable indexing, block-swap operator and Gaussian log-likelihood.

Variables come in two groups of equal size q: a left block L = {0, ..., q-1}
and a right block R = {q, ..., 2q-1}, with variable i paired to i + q.
Concentration and covariance matrices are stored as dense symmetric 2q x 2q
arrays.  All objects here are immutable values; operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, NotPositiveDefiniteError


@dataclass(frozen=True)
class PairedIndex:
    """The L/R partition of p = 2q variables with pairing i <-> i + q."""

    q: int

    def __post_init__(self):
        if self.q < 1:
            raise DimensionError(f"group size must be >= 1, got q={self.q}")

    @property
    def p(self) -> int:
        return 2 * self.q

    @property
    def s(self) -> int:
        """Number of unordered pairs i < j inside one group."""
        return self.q * (self.q - 1) // 2

    @property
    def vec_length(self) -> int:
        return 3 * self.q + 4 * self.s

    @classmethod
    def from_p(cls, p: int) -> "PairedIndex":
        if p < 2 or p % 2 != 0:
            raise DimensionError(f"total dimension must be even and >= 2, got p={p}")
        return cls(p // 2)

    @cached_property
    def _pairs(self):
        """Row/col indices of the strict upper triangle of one q x q block,
        in row-major pair order (0,1), (0,2), ..., (q-2, q-1)."""
        i, j = np.triu_indices(self.q, k=1)
        return i, j

    @cached_property
    def _vec_rows_cols(self):
        """Row and column index arrays mapping a symmetric matrix to its
        canonical half-vectorization (see :func:`pd_vec` for the layout)."""
        q = self.q
        d = np.arange(q)
        i, j = self._pairs
        rows = np.concatenate([d, d + q, i, i + q, i, i + q, d])
        cols = np.concatenate([d, d + q, j, j + q, j + q, j, d + q])
        return rows, cols

    @cached_property
    def swap_perm(self) -> np.ndarray:
        """Permutation implementing the L/R block swap."""
        q = self.q
        return np.concatenate([np.arange(q, 2 * q), np.arange(q)])


def _check_square(M: np.ndarray, idx: PairedIndex, name: str = "matrix") -> None:
    if M.shape != (idx.p, idx.p):
        raise DimensionError(
            f"{name} has shape {M.shape}, expected ({idx.p}, {idx.p}) for q={idx.q}"
        )


def pd_vec(M: np.ndarray, idx: PairedIndex) -> np.ndarray:
    """Half-vectorize a symmetric paired matrix in the canonical block order.

    The segments are, in order: diag(LL) [q], diag(RR) [q], strict upper of
    LL [s], of RR [s], of LR [s], of RL [s], and diag(LR) [q], where
    s = q(q-1)/2 and strict-upper segments run in row-major pair order.
    The result has length 3q + 4s = p(p+1)/2 and is a bijection of the upper
    triangle (diagonal included).
    """
    _check_square(M, idx)
    rows, cols = idx._vec_rows_cols
    return np.asarray(M, dtype=float)[rows, cols]


def pd_unvec(v: np.ndarray, idx: PairedIndex) -> np.ndarray:
    """Inverse of :func:`pd_vec`: rebuild the symmetric matrix from its vector."""
    v = np.asarray(v, dtype=float)
    if v.shape != (idx.vec_length,):
        raise DimensionError(
            f"vector has shape {v.shape}, expected ({idx.vec_length},) for q={idx.q}"
        )
    rows, cols = idx._vec_rows_cols
    M = np.zeros((idx.p, idx.p))
    M[rows, cols] = v
    M[cols, rows] = v
    return M


def swap_blocks(M: np.ndarray, idx: PairedIndex) -> np.ndarray:
    """Conjugate by the block-swap permutation: exchanges LL with RR and LR with RL."""
    _check_square(M, idx)
    perm = idx.swap_perm
    return np.asarray(M)[np.ix_(perm, perm)]


def symmetrize_paired(M: np.ndarray, idx: PairedIndex) -> np.ndarray:
    """Average a matrix with its block-swapped image.

    The result is a fixed point of :func:`swap_blocks` and stays positive
    definite whenever the input is (the PD cone is convex and the swap is a
    congruence by a permutation).
    """
    return 0.5 * (np.asarray(M, dtype=float) + swap_blocks(M, idx))


def log_likelihood(theta: np.ndarray, S: np.ndarray) -> float:
    """Gaussian log-likelihood log det(theta) - trace(S theta), up to constants.

    Raises :class:`NotPositiveDefiniteError` when the log-determinant is
    undefined.
    """
    theta = np.asarray(theta, dtype=float)
    S = np.asarray(S, dtype=float)
    if theta.shape != S.shape or theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise DimensionError(
            f"incompatible shapes theta={theta.shape}, S={S.shape}"
        )
    sign, logdet = np.linalg.slogdet(theta)
    if sign <= 0 or not np.isfinite(logdet):
        raise NotPositiveDefiniteError("theta must be positive definite")
    return float(logdet - np.sum(S * theta))


def is_positive_definite(M: np.ndarray) -> bool:
    """Cheap PD check via Cholesky."""
    try:
        np.linalg.cholesky(M)
        return True
    except np.linalg.LinAlgError:
        return False
