"""Traceless 2x2 Hamiltonians ``[[a, b], [c, -a]]``.

Such a matrix is pseudo-Hermitian exactly when its determinant
``-a**2 - b*c`` is real.  A negative determinant means a real eigenvalue
pair (stratum ``MMinus``), a positive one an imaginary pair (``MPlus``).
Where the determinant vanishes the eigenvalues coincide at zero and the
matrix is either zero or nilpotent and nondiagonalizable.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGrid, NotInModuli
from .matcore import DEFAULT_TOLERANCES, Tolerances
from .pseudoherm import check_pseudo_hermiticity

__all__ = [
    "Traceless2",
    "Class",
    "Class2",
    "ModuliFactor",
    "CrossingFamily",
    "SweepRecord",
    "classify",
    "factorize",
    "sweep_family",
    "SIGMA3",
]

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])


@dataclass(frozen=True)
class Traceless2:
    a: complex
    b: complex
    c: complex

    @classmethod
    def from_matrix(cls, m) -> "Traceless2":
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[0, 0] + m[1, 1]) > 1e-12 * max(1.0, np.linalg.norm(m)):
            raise ValueError("matrix is not traceless")
        return cls(complex(m[0, 0] - m[1, 1]) / 2, complex(m[0, 1]), complex(m[1, 0]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, -self.a]], dtype=np.complex128)

    @property
    def det(self) -> complex:
        return -self.a * self.a - self.b * self.c

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


class Class(str, enum.Enum):
    ZERO = "Zero"
    MPLUS = "MPlus"
    MMINUS = "MMinus"
    NILPOTENT = "NilpotentNonDiagonalizable"
    NOT_PSEUDO_HERMITIAN = "NotPseudoHermitian"

    @property
    def is_pseudo_hermitian(self) -> bool:
        return self is not Class.NOT_PSEUDO_HERMITIAN


@dataclass(frozen=True)
class Class2:
    kind: Class
    det: complex
    eigenvalues: tuple


def _principal_pair(w: complex) -> tuple:
    """``(r, -r)`` with ``r**2 = w``; ``r`` has ``Re > 0``, or ``Im >= 0`` when purely imaginary."""
    r = cmath.sqrt(w)
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    return (r, -r)


def classify(m: Traceless2, tol: Tolerances = DEFAULT_TOLERANCES) -> Class2:
    """Place `m` in one of the strata.

    ``Zero`` when ``||m||_F <= verify_rel``; ``NilpotentNonDiagonalizable``
    when ``|det| <= verify_rel ||m||_F^2``; otherwise the determinant is
    real when ``|Im det| <= verify_rel (1 + |det|)`` and its sign picks the
    stratum.
    """
    det = m.det
    eigs = _principal_pair(-det)
    norm = m.norm
    if norm <= tol.verify_rel:
        kind = Class.ZERO
    elif abs(det) <= tol.verify_rel * norm * norm:
        kind = Class.NILPOTENT
    elif abs(det.imag) > tol.verify_rel * (1 + abs(det)):
        kind = Class.NOT_PSEUDO_HERMITIAN
    elif det.real > 0:
        kind = Class.MPLUS
    else:
        kind = Class.MMINUS
    return Class2(kind, det, eigs)


@dataclass(frozen=True)
class ModuliFactor:
    """``m = prefactor * E * inv(g) @ sigma3 @ g`` with ``det g = 1``.

    ``sign`` is the sign of ``det m``; the prefactor is ``1`` on ``MMinus``
    (real eigenvalues ``+-E``) and ``i`` on ``MPlus``.
    """

    sign: int
    E: float
    g: np.ndarray

    @property
    def prefactor(self) -> complex:
        return 1.0 if self.sign < 0 else 1j

    def reconstruct(self) -> np.ndarray:
        return self.prefactor * self.E * np.linalg.solve(self.g, SIGMA3 @ self.g)


def factorize(m: Traceless2, tol: Tolerances = DEFAULT_TOLERANCES) -> ModuliFactor:
    """Split an element of ``MPlus``/``MMinus`` into scale and group element.

    ``E = sqrt(|det m|) > 0``.  The columns of ``inv(g)`` are eigenvectors of
    `m` for ``+prefactor*E`` and ``-prefactor*E``, rescaled by the principal
    square root of their determinant so that ``det g = 1``.

    Raises
    ------
    NotInModuli
        If `m` is zero, nilpotent or not pseudo-Hermitian.
    """
    cls = classify(m, tol)
    if cls.kind not in (Class.MPLUS, Class.MMINUS):
        raise NotInModuli(f"matrix is {cls.kind.value}, not in M+ or M-")
    sign = 1 if cls.kind is Class.MPLUS else -1
    E = float(np.sqrt(abs(cls.det)))
    prefactor = 1.0 if sign < 0 else 1j
    values, vectors = np.linalg.eig(m.matrix)
    plus = int(np.argmin(np.abs(values - prefactor * E)))
    V = vectors[:, [plus, 1 - plus]]
    V = V / cmath.sqrt(np.linalg.det(V))
    g = np.linalg.inv(V)
    return ModuliFactor(sign, E, g)


@dataclass(frozen=True)
class CrossingFamily:
    """``a(l) = a_r l`` for ``l <= 0`` and ``i a_i l`` for ``l >= 0``; ``b(l) = b0 + b1 l``; ``c = 0``."""

    a_r: float
    a_i: float
    b0: complex
    b1: complex
    epsilon: float

    def __post_init__(self):
        if self.a_r == 0 or self.a_i == 0:
            raise ValueError("a_r and a_i must be nonzero")
        if not self.epsilon > 0:
            raise InvalidGrid(f"epsilon must be positive, got {self.epsilon}")

    def at(self, lam: float) -> Traceless2:
        a = self.a_r * lam if lam <= 0 else 1j * self.a_i * lam
        return Traceless2(complex(a), complex(self.b0 + self.b1 * lam), 0j)


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    eigenvalues: tuple
    kind: Class
    diagonalizable: bool
    pseudo_hermitian: bool


def sweep_grid(epsilon: float, steps: int) -> list:
    """``steps`` uniform points on ``[-epsilon, epsilon]`` with ``0`` at the middle, exactly."""
    if steps < 3 or steps % 2 == 0:
        raise InvalidGrid(f"steps must be odd and at least 3 so that 0 is a grid point, got {steps}")
    if not epsilon > 0:
        raise InvalidGrid(f"epsilon must be positive, got {epsilon}")
    half = steps // 2
    return [epsilon * (k - half) / half for k in range(steps)]


def sweep_family(f: CrossingFamily, steps: int, tol: Tolerances = DEFAULT_TOLERANCES) -> list:
    """Classify the family on a uniform grid through the crossing at ``0``.

    Diagonalizability and pseudo-Hermiticity are taken from the general
    Jordan pipeline, independently of :func:`classify`.
    """
    records = []
    for lam in sweep_grid(f.epsilon, steps):
        m = f.at(lam)
        cls = classify(m, tol)
        verdict = check_pseudo_hermiticity(m.matrix, tol)
        records.append(
            SweepRecord(
                lam, cls.eigenvalues, cls.kind,
                verdict.decomposition.is_diagonalizable, verdict.is_pseudo_hermitian,
            )
        )
    return records
