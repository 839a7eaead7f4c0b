"""Numerical Jordan structure: clusters, Weyr/Segre data, chains, dual basis.

Column ``k`` of ``chain_basis`` is the chain vector ``psi`` labelled
``layout[k] = (n, a, i)``; all three labels are zero based, so ``i = 0``
is the eigenvector at the bottom of the chain and

    H psi[n, a, 0]   = E_n psi[n, a, 0]
    H psi[n, a, i+1] = E_n psi[n, a, i+1] + psi[n, a, i].

``dual_basis`` holds the biorthonormal partners ``phi`` (columns of
``inv(A)^H``), so ``dual_basis^H @ chain_basis = I``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AmbiguousClustering,
    ChainConstructionFailure,
    InvalidWeyr,
    NoSaturation,
)
from .matcore import (
    DEFAULT_TOLERANCES,
    Tolerances,
    adjoint,
    as_cmatrix,
    eigenvalues,
    inverse,
    spectral_scale,
)

__all__ = [
    "SpectralDatum",
    "JordanDecomposition",
    "cluster_spectrum",
    "kernel_dimension_sequence",
    "segre_from_weyr",
    "jordan_chains",
    "canonical_form",
    "reconstruct",
    "CONDITION_WARNING",
]

CONDITION_WARNING = 1e8


@dataclass(frozen=True)
class SpectralDatum:
    """One eigenvalue cluster and its Jordan data.

    ``weyr[l-1] = dim ker (H - E)^l`` up to saturation; ``jordan_dims`` is
    the conjugate partition, sorted in descending order.
    """

    eigenvalue: complex
    weyr: tuple
    jordan_dims: tuple

    @property
    def geometric_mult(self) -> int:
        return self.weyr[0]

    @property
    def algebraic_mult(self) -> int:
        return self.weyr[-1]

    @property
    def index(self) -> int:
        """Length of the longest chain (where the Weyr sequence saturates)."""
        return len(self.weyr)

    @property
    def is_defective(self) -> bool:
        return self.index > 1


@dataclass(frozen=True)
class JordanDecomposition:
    matrix: np.ndarray
    data: tuple
    chain_basis: np.ndarray
    dual_basis: np.ndarray
    layout: tuple

    @property
    def dim(self) -> int:
        return self.chain_basis.shape[0]

    def chain_columns(self, n: int, a: int) -> list:
        """Column indices of chain ``(n, a)`` in ascending ``i``."""
        cols = [k for k, (nn, aa, _) in enumerate(self.layout) if nn == n and aa == a]
        if not cols:
            raise KeyError((n, a))
        return cols

    def chains(self, n: int):
        """Yield ``(a, columns)`` for every chain of cluster `n`."""
        for a in range(self.data[n].geometric_mult):
            yield a, self.chain_columns(n, a)

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.chain_basis))

    @property
    def is_diagonalizable(self) -> bool:
        return all(d.index == 1 for d in self.data)


def _link(points: np.ndarray, radius: float) -> list:
    """Single-linkage components of `points` at `radius`, as index arrays.

    Components are ordered by their smallest member index.
    """
    n = len(points)
    adjacent = np.abs(points[:, None] - points[None, :]) <= radius
    label = np.full(n, -1)
    groups = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(groups)
        stack, members = [start], [start]
        while stack:
            k = stack.pop()
            for j in np.flatnonzero(adjacent[k] & (label < 0)):
                label[j] = len(groups)
                stack.append(j)
                members.append(j)
        groups.append(np.array(sorted(members)))
    return groups


def _order_key(z: complex):
    return (z.real, z.imag)


def cluster_spectrum(eigs: Sequence[complex], tol: Tolerances = DEFAULT_TOLERANCES, scale: float | None = None):
    """Group eigenvalues by single linkage at radius ``cluster_rel * scale``.

    Returns ``[(center, count), ...]`` ordered by (real, imaginary) part of
    the center, which is the arithmetic mean of the members.

    Raises
    ------
    AmbiguousClustering
        If two resulting centers lie within three clustering radii.
    """
    points = np.asarray(eigs, dtype=np.complex128).ravel()
    if points.size == 0:
        raise ValueError("cannot cluster an empty spectrum")
    if scale is None:
        scale = spectral_scale(points)
    radius = tol.cluster_rel * scale
    clusters = [(complex(points[g].mean()), len(g)) for g in _link(points, radius)]
    clusters.sort(key=lambda c: _order_key(c[0]))
    centers = np.array([c for c, _ in clusters])
    gaps = np.abs(centers[:, None] - centers[None, :])
    np.fill_diagonal(gaps, np.inf)
    if gaps.min() < 3 * radius:
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise AmbiguousClustering(
            f"cluster centers {centers[i]:.6g} and {centers[j]:.6g} are closer "
            f"than 3x the clustering radius {radius:.3e}"
        )
    return clusters


def _staircase(H: np.ndarray, E: complex, tol: Tolerances):
    """Kernel dimensions of ``(H - E)^l`` and nested orthonormal kernel bases.

    Deflation instead of explicit powers: with ``V`` an orthonormal basis
    of ``ker B`` and ``W`` of its complement, ``dim ker B^l = dim ker B +
    dim ker (W^H B W)^(l-1)``.  Every rank decision is made on an unpowered,
    unitarily compressed matrix against ``rank_rel * dim * max(||H||, |E|)``.
    Returns ``(weyr, Q)`` where ``Q[:, :weyr[l-1]]`` spans ``ker B^l``.
    """
    n = H.shape[0]
    B = H - E * np.eye(n)
    threshold = tol.rank_rel * n * max(np.linalg.norm(H, 2), abs(E))
    Q = np.eye(n, dtype=np.complex128)
    weyr = []
    offset = 0
    while offset < n:
        W = Q[:, offset:]
        M = W.conj().T @ B @ W
        _, s, vh = np.linalg.svd(M)
        k = int(np.count_nonzero(s <= threshold))
        if k == 0:
            break
        Q[:, offset:] = W @ np.concatenate([vh[len(s) - k:], vh[: len(s) - k]]).conj().T
        offset += k
        weyr.append(offset)
        if len(weyr) > n:
            raise NoSaturation(f"kernel dimensions {weyr} keep growing past dim={n}")
    return weyr, Q


def kernel_dimension_sequence(H, E: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> list:
    """``[dim ker (H - E)^l for l = 1, 2, ...]`` up to saturation.

    The last entry is the algebraic multiplicity of `E` and the length of
    the list is the size of its largest Jordan block.  Returns ``[0]`` when
    `E` is not an eigenvalue.
    """
    weyr, _ = _staircase(np.asarray(H, dtype=np.complex128), E, tol)
    return weyr or [0]


def segre_from_weyr(weyr: Sequence[int]) -> tuple:
    """Jordan block sizes (descending) from a Weyr sequence.

    The number of blocks of size at least ``l`` is ``weyr[l-1] - weyr[l-2]``.

    >>> segre_from_weyr([2, 3, 4])
    (3, 1)
    """
    weyr = [int(w) for w in weyr]
    if not weyr or weyr[0] <= 0:
        raise InvalidWeyr(f"Weyr sequence must start with a positive entry: {weyr}")
    steps = [weyr[0]] + [b - a for a, b in zip(weyr, weyr[1:])]
    if any(b > a for a, b in zip(steps, steps[1:])) or steps[-1] <= 0:
        raise InvalidWeyr(f"increments of {weyr} must be positive and nonincreasing")
    return tuple(sum(1 for s in steps if s >= k) for k in range(1, steps[0] + 1))


def _coalescence_radii(tol: Tolerances, scale: float) -> list:
    r, top = tol.cluster_rel * scale, tol.coalesce_rel * scale
    radii = [r]
    while radii[-1] < top:
        radii.append(min(radii[-1] * math.sqrt(10.0), top))
    return radii


def _valid_weyr(H, center, count, tol):
    try:
        weyr = kernel_dimension_sequence(H, center, tol)
        segre_from_weyr(weyr)
    except (InvalidWeyr, NoSaturation):
        return None
    return weyr if weyr[-1] == count else None


def _resolve_clusters(H: np.ndarray, eigs: np.ndarray, tol: Tolerances):
    # Computed eigenvalues of a p-block split by roughly eps**(1/p), far more
    # than cluster_rel.  Walk down a ladder of linkage radii and keep the
    # coarsest groups whose rank-determined multiplicity matches their size.
    radii = _coalescence_radii(tol, spectral_scale(eigs))
    resolved = []

    def split(members, level):
        center = complex(eigs[members].mean())
        weyr = _valid_weyr(H, center, len(members), tol)
        if weyr is not None or level == 0:
            resolved.append((center, members, weyr))
            return
        for sub in _link(eigs[members], radii[level - 1]):
            split(members[sub], level - 1)

    top = len(radii) - 1
    for group in _link(eigs, radii[top]):
        split(group, top)

    out = []
    for center, members, weyr in resolved:
        if weyr is None:
            raise ChainConstructionFailure(
                f"eigenvalue cluster at {center:.6g} with {len(members)} member(s) has "
                f"kernel dimensions {kernel_dimension_sequence(H, center, tol)} "
                "inconsistent with its size"
            )
        out.append((center, weyr))
    out.sort(key=lambda c: _order_key(c[0]))
    return out


def _orthonormal(columns: np.ndarray, expected: int, what: str) -> np.ndarray:
    if expected == 0:
        return np.zeros((columns.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    if len(s) < expected or s[expected - 1] <= 1e-8 * s[0]:
        raise ChainConstructionFailure(f"{what}: expected {expected} independent directions")
    return u[:, :expected]


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def _cluster_chains(H: np.ndarray, E: complex, tol: Tolerances) -> list:
    n = H.shape[0]
    B = H - E * np.eye(n)
    weyr, Q = _staircase(H, E, tol)
    p = len(weyr)
    w = [0] + list(weyr) + [weyr[-1]]
    kernels = [Q[:, :d] for d in w[: p + 1]]

    chains = []  # each chain is [psi_0, ..., psi_{k-1}]
    for ell in range(p, 0, -1):
        count = (w[ell] - w[ell - 1]) - (w[ell + 1] - w[ell])
        if count < 0:
            raise ChainConstructionFailure(f"Weyr sequence {weyr} is not a partition")
        if count == 0:
            continue
        level = [c[ell - 1] for c in chains]
        span = np.column_stack([kernels[ell - 1]] + level) if level else kernels[ell - 1]
        Q = _orthonormal(span, w[ell - 1] + len(level), f"level {ell} at E={E:.6g}")
        N = kernels[ell]
        complement = N - Q @ (Q.conj().T @ N)
        u, s, _ = np.linalg.svd(complement, full_matrices=False)
        if len(s) < count or s[count - 1] <= tol.verify_rel:
            raise ChainConstructionFailure(
                f"cannot find {count} chain top(s) of length {ell} at E={E:.6g}; "
                "back-substitution rank disagrees with the Weyr sequence"
            )
        for top in u[:, :count].T:
            chain = [_normalize_phase(top)]
            for _ in range(ell - 1):
                chain.append(B @ chain[-1])
            chain.reverse()
            largest = max(np.linalg.norm(v) for v in chain)
            chains.append([v / largest for v in chain])
    return chains


def jordan_chains(H, tol: Tolerances = DEFAULT_TOLERANCES) -> JordanDecomposition:
    """Jordan decomposition ``H = A J A^{-1}`` with chain basis `A`.

    Clusters are ordered by (real, imaginary) part of their center, chains
    within a cluster by descending length, vectors within a chain by
    ascending position.  A ``RuntimeWarning`` is issued when ``cond(A)``
    exceeds ``CONDITION_WARNING``.

    Raises
    ------
    ChainConstructionFailure
        When rank decisions are mutually inconsistent at the given tolerances.
    SingularMatrix
        When the assembled chain basis is numerically singular.
    """
    H = as_cmatrix(H)
    clusters = _resolve_clusters(H, eigenvalues(H), tol)
    data, columns, layout = [], [], []
    for n, (center, weyr) in enumerate(clusters):
        dims = segre_from_weyr(weyr)
        data.append(SpectralDatum(center, tuple(weyr), dims))
        chains = _cluster_chains(H, center, tol)
        if tuple(len(c) for c in chains) != dims:
            raise ChainConstructionFailure(
                f"built chains {[len(c) for c in chains]} but Weyr data says {dims}"
            )
        for a, chain in enumerate(chains):
            for i, vec in enumerate(chain):
                columns.append(vec)
                layout.append((n, a, i))
    if len(columns) != H.shape[0]:
        raise ChainConstructionFailure(
            f"algebraic multiplicities sum to {len(columns)}, expected {H.shape[0]}"
        )
    A = np.column_stack(columns)
    dual = adjoint(inverse(A, tol))
    cond = np.linalg.cond(A)
    if cond > CONDITION_WARNING:
        warnings.warn(
            f"Jordan chain basis is ill conditioned (cond={cond:.3e}); "
            "the computed structure may be fragile",
            RuntimeWarning,
            stacklevel=2,
        )
    for arr in (A, dual):
        arr.setflags(write=False)
    return JordanDecomposition(H, tuple(data), A, dual, tuple(layout))


def canonical_form(dec: JordanDecomposition) -> np.ndarray:
    """The block-diagonal Jordan matrix ``J`` matching ``dec.layout``."""
    J = np.zeros((dec.dim, dec.dim), dtype=np.complex128)
    for k, (n, a, i) in enumerate(dec.layout):
        J[k, k] = dec.data[n].eigenvalue
        if i > 0:
            J[k - 1, k] = 1.0
    return J


def reconstruct(dec: JordanDecomposition) -> np.ndarray:
    """``sum E |psi_i><phi_i| + |psi_i><phi_{i+1}|`` over all chains."""
    A, Phi = dec.chain_basis, dec.dual_basis
    out = np.zeros((dec.dim, dec.dim), dtype=np.complex128)
    for k, (n, a, i) in enumerate(dec.layout):
        out += dec.data[n].eigenvalue * np.outer(A[:, k], Phi[:, k].conj())
        if i > 0:
            out += np.outer(A[:, k - 1], Phi[:, k].conj())
    return out
