"""Dense complex matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The helpers
here validate them (square, finite) and provide the two numerically
delicate building blocks used everywhere else: SVD-based numerical rank
and the eigenvalues of a general complex matrix.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, SingularMatrix

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "as_cmatrix",
    "adjoint",
    "inverse",
    "numerical_rank",
    "rank_threshold",
    "eigenvalues",
    "spectral_scale",
]


@dataclass(frozen=True)
class Tolerances:
    """Relative thresholds used by the numerical pipeline.

    Attributes
    ----------
    rank_rel : float
        Singular values at or below ``rank_rel * sigma_max * dim`` count as zero.
    cluster_rel : float
        Single-linkage radius for grouping eigenvalues, relative to the
        spectral scale.  Also the radius for matching conjugate pairs.
    verify_rel : float
        Bound on relative residuals of operator identities.
    real_rel : float
        An eigenvalue is real when ``|Im E| <= real_rel * scale``.
    coalesce_rel : float
        Largest radius (relative to the spectral scale) over which split
        eigenvalues of a defective cluster may be merged.  A merge is only
        accepted when the rank test confirms the algebraic multiplicity.
    """

    rank_rel: float = 1e-10
    cluster_rel: float = 1e-6
    verify_rel: float = 1e-8
    real_rel: float = 1e-8
    coalesce_rel: float = 1e-2

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (0.0 < value < 1.0):
                raise ValueError(f"tolerance {name}={value!r} must lie in (0, 1)")

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def as_cmatrix(m) -> np.ndarray:
    """Return `m` as a read-only square ``complex128`` array.

    Raises
    ------
    DimensionMismatch
        If `m` is not a nonempty square 2-d array.
    ValueError
        If any entry is NaN or infinite.
    """
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    a.setflags(write=False)
    return a


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    a = np.asarray(m, dtype=np.complex128)
    return a.conj().T.copy()


def rank_threshold(singular_values: np.ndarray, dim: int, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    smax = float(singular_values[0]) if len(singular_values) else 0.0
    return tol.rank_rel * smax * dim


def numerical_rank(m, tol: Tolerances = DEFAULT_TOLERANCES, reference: float | None = None) -> int:
    """Number of singular values above ``rank_rel * sigma_max * dim``.

    The zero matrix has rank 0.  When `reference` is given it replaces
    ``sigma_max`` as the scale of the threshold; use it when `m` is a
    difference of larger quantities and may consist of roundoff alone.
    """
    a = np.asarray(m, dtype=np.complex128)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    if reference is None:
        threshold = rank_threshold(s, a.shape[0], tol)
    else:
        threshold = tol.rank_rel * reference * a.shape[0]
    return int(np.count_nonzero(s > threshold))


def inverse(m, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Inverse of a numerically nonsingular matrix.

    Raises
    ------
    SingularMatrix
        When the smallest singular value is at or below the rank threshold
        (always the case for the zero matrix).
    """
    a = np.asarray(m, dtype=np.complex128)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= rank_threshold(s, a.shape[0], tol):
        raise SingularMatrix(
            f"smallest singular value {s[-1]:.3e} below threshold "
            f"(sigma_max={s[0]:.3e}, dim={a.shape[0]})"
        )
    return np.linalg.solve(a, np.eye(a.shape[0], dtype=np.complex128))


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of `m`, with multiplicity and in no particular order.

    Uses LAPACK's Hessenberg reduction followed by shifted QR (``zgeev``).
    """
    a = np.asarray(m, dtype=np.complex128)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def spectral_scale(eigs) -> float:
    """``max(1, spectral radius)``, the scale all relative radii refer to."""
    eigs = np.asarray(eigs)
    return max(1.0, float(np.max(np.abs(eigs)))) if eigs.size else 1.0
