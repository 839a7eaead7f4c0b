"""Builders for matrices with a prescribed Jordan structure."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import block_diag

__all__ = ["jordan_block", "jordan_matrix", "random_similarity", "similar_to", "blocks_by_eigenvalue"]


def jordan_block(eigenvalue: complex, size: int) -> np.ndarray:
    J = np.diag(np.full(size, eigenvalue, dtype=np.complex128))
    return J + np.diag(np.ones(size - 1, dtype=np.complex128), 1)


def jordan_matrix(blocks: Iterable[tuple]) -> np.ndarray:
    """Direct sum of Jordan blocks given as ``(eigenvalue, size)`` pairs."""
    return np.asarray(block_diag(*[jordan_block(e, p) for e, p in blocks]), dtype=np.complex128)


def random_similarity(dim: int, rng: np.random.Generator, max_cond: float = 100.0) -> np.ndarray:
    """Random complex ``S = U diag(s) V`` with ``cond(S) <= max_cond``.

    Singular values are log-spaced between 1 and a condition number drawn
    uniformly from ``[1, max_cond]``; `U` and `V` are Haar-like unitaries.
    """
    def unitary():
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    cond = rng.uniform(1.0, max_cond)
    s = np.geomspace(1.0, cond, dim) if dim > 1 else np.ones(1)
    return unitary() @ np.diag(rng.permutation(s)) @ unitary()


def similar_to(J: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``S J S^{-1}``."""
    return S @ np.linalg.solve(S.T, J.T).T


def blocks_by_eigenvalue(blocks: Sequence[tuple]) -> dict:
    """``{eigenvalue: sorted sizes (descending)}`` for a block list."""
    out: dict = {}
    for e, p in blocks:
        out.setdefault(complex(e), []).append(p)
    return {e: tuple(sorted(ps, reverse=True)) for e, ps in out.items()}
