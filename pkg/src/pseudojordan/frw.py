"""Effective two-component Hamiltonian of a closed FRW cosmology with a massive scalar field.

In the oscillator basis of the scalar field the operator ``D`` is
diagonal with entries

    d_n = m a^3 (2n + 1) - a^4,

and the two-component Hamiltonian splits into 2x2 blocks
``(1/2) [[1 + d_n, -1 + d_n], [1 - d_n, -1 - d_n]]``, one per level.  Each
block is traceless with determinant ``-d_n`` and eigenvalues
``+-sqrt(d_n)``.  Keeping the first ``N`` levels is therefore exact for
those levels.  At the critical scale factors ``a = (2n + 1) m`` the level
``d_n`` vanishes and its block is nilpotent.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange
from .jordan import JordanDecomposition
from .matcore import DEFAULT_TOLERANCES, Tolerances, as_cmatrix
from .pseudoherm import Verdict, check_pseudo_hermiticity, verify_intertwining
from .two_by_two import Class, Traceless2, classify

__all__ = [
    "FrwParams",
    "FrwLevel",
    "FrwReport",
    "CRITICAL_REL",
    "oscillator_level",
    "frw_eigenvalues",
    "frw_levels",
    "build_truncated_hamiltonian",
    "block_sigma3",
    "critical_scale_factors",
    "analyze_frw",
]

CRITICAL_REL = 1e-9


@dataclass(frozen=True)
class FrwParams:
    m: float
    scale_a: float
    levels: int

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if not self.scale_a > 0:
            raise ValueError(f"scale factor must be positive, got {self.scale_a}")
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError(f"levels must be a positive integer, got {self.levels}")

    @property
    def alpha(self) -> float:
        return float(np.log(self.scale_a))


@dataclass(frozen=True)
class FrwLevel:
    n: int
    d_n: float
    e_plus: complex
    e_minus: complex
    critical: bool


def _check_level(p: FrwParams, n: int):
    if not 0 <= n < p.levels:
        raise IndexOutOfRange(f"level {n} outside 0..{p.levels - 1}")


def oscillator_level(p: FrwParams, n: int) -> float:
    _check_level(p, n)
    a = p.scale_a
    return p.m * a**3 * (2 * n + 1) - a**4


def frw_eigenvalues(p: FrwParams, n: int) -> tuple:
    """``(+sqrt(d_n), -sqrt(d_n))`` on the principal branch."""
    r = cmath.sqrt(complex(oscillator_level(p, n), 0.0))
    return (r, -r)


def is_critical(p: FrwParams, n: int) -> bool:
    return abs(oscillator_level(p, n)) <= CRITICAL_REL * max(1.0, p.scale_a**4)


def frw_levels(p: FrwParams) -> list:
    out = []
    for n in range(p.levels):
        plus, minus = frw_eigenvalues(p, n)
        out.append(FrwLevel(n, oscillator_level(p, n), plus, minus, is_critical(p, n)))
    return out


def level_block(d: float) -> np.ndarray:
    return 0.5 * np.array([[1 + d, -1 + d], [1 - d, -1 - d]], dtype=np.complex128)


def build_truncated_hamiltonian(p: FrwParams) -> np.ndarray:
    """``2N x 2N`` block diagonal Hamiltonian, levels ascending, (upper, lower) within a level."""
    H = np.zeros((2 * p.levels, 2 * p.levels), dtype=np.complex128)
    for n in range(p.levels):
        H[2 * n : 2 * n + 2, 2 * n : 2 * n + 2] = level_block(oscillator_level(p, n))
    return as_cmatrix(H)


def block_sigma3(levels: int) -> np.ndarray:
    """``diag(1, -1, 1, -1, ...)`` of size ``2 * levels``."""
    return np.diag(np.tile([1.0 + 0j, -1.0 + 0j], levels))


def critical_scale_factors(p: FrwParams) -> list:
    return [(2 * n + 1) * p.m for n in range(p.levels)]


@dataclass(frozen=True)
class FrwReport:
    params: FrwParams
    levels: tuple
    level_classes: tuple
    hamiltonian: np.ndarray
    sigma3_residual: float
    verdict: Verdict

    @property
    def decomposition(self) -> JordanDecomposition:
        return self.verdict.decomposition

    @property
    def zero_clusters(self) -> list:
        """Spectral data of clusters at zero (within the critical tolerance)."""
        scale = max(1.0, self.params.scale_a**2)
        return [d for d in self.decomposition.data if abs(d.eigenvalue) <= 1e-6 * scale]

    @property
    def critical_levels(self) -> list:
        return [lv.n for lv in self.levels if lv.critical]


def analyze_frw(p: FrwParams, tol: Tolerances = DEFAULT_TOLERANCES) -> FrwReport:
    """Build the truncated Hamiltonian and run the general pipeline on it."""
    H = build_truncated_hamiltonian(p)
    levels = frw_levels(p)
    classes = tuple(
        classify(Traceless2.from_matrix(level_block(lv.d_n)), tol).kind for lv in levels
    )
    residual = verify_intertwining(H, block_sigma3(p.levels), tol)
    verdict = check_pseudo_hermiticity(H, tol)
    return FrwReport(p, tuple(levels), classes, H, residual, verdict)
