"""Pseudo-Hermiticity: spectrum pairing, metric operators, semidefinite forms.

A matrix ``H`` is pseudo-Hermitian when ``eta H = H^H eta`` for some
Hermitian invertible ``eta``.  For matrices with a Jordan decomposition
this holds exactly when every non-real eigenvalue ``E`` has a partner at
``conj(E)`` with the same Jordan block sizes.  When it holds, ``eta`` can
be written down from the dual basis ``phi``:

* a real cluster contributes ``sigma * sum_i |phi_i><phi_{p-1-i}|`` per
  chain (a flip inside the chain, with a sign ``sigma``);
* a conjugate pair ``(nu, nu-)`` contributes
  ``sum_i |phi[nu]_i><phi[nu-]_{p-1-i}| + h.c.`` per chain.

Chain positions are zero based throughout (see :mod:`pseudojordan.jordan`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    AmbiguousClustering,
    DimensionMismatch,
    IndexMismatch,
    SignCountMismatch,
    SingularMatrix,
    ZeroLeadingCoefficient,
)
from .jordan import JordanDecomposition, jordan_chains
from .matcore import DEFAULT_TOLERANCES, Tolerances, adjoint, as_cmatrix, inverse, spectral_scale

__all__ = [
    "SpectrumPairing",
    "UnpairedEigenvalue",
    "JordanMismatch",
    "MetricOperator",
    "Verdict",
    "NullVector",
    "pair_spectrum",
    "check_pseudo_hermiticity",
    "canonical_metric",
    "canonical_metric_inverse",
    "general_metric",
    "verify_intertwining",
    "hermiticity_residual",
    "semidefinite_form",
    "check_metric_hermiticity",
    "null_vectors",
    "psi_representation",
]


@dataclass(frozen=True)
class SpectrumPairing:
    """Real clusters and conjugate pairs ``(nu, nu_minus)`` with ``Im E_nu > 0``."""

    real_labels: tuple
    pair_map: tuple

    def real_chains(self, dec: JordanDecomposition) -> list:
        """``(n, a)`` for every chain of a real cluster: the order of the signs."""
        return [(n, a) for n in self.real_labels for a in range(dec.data[n].geometric_mult)]

    def pair_chains(self, dec: JordanDecomposition) -> list:
        """``(nu, nu_minus, a)`` for every chain of an upper cluster."""
        return [(nu, mu, a) for nu, mu in self.pair_map for a in range(dec.data[nu].geometric_mult)]


@dataclass(frozen=True)
class UnpairedEigenvalue:
    eigenvalue: complex
    cluster: int

    def describe(self) -> str:
        return f"eigenvalue {self.eigenvalue:.6g} has no complex-conjugate partner"


@dataclass(frozen=True)
class JordanMismatch:
    upper: int
    lower: int
    upper_dims: tuple
    lower_dims: tuple

    def describe(self) -> str:
        return (
            f"conjugate clusters {self.upper} and {self.lower} have Jordan dimensions "
            f"{list(self.upper_dims)} and {list(self.lower_dims)}"
        )


PairingFailure = Union[UnpairedEigenvalue, JordanMismatch]


@dataclass(frozen=True)
class MetricOperator:
    eta: np.ndarray
    provenance: dict
    hermiticity_residual: float
    intertwining_residual: float
    min_eigenvalue: float

    @property
    def is_positive_definite(self) -> bool:
        return self.min_eigenvalue > 0.0


@dataclass(frozen=True)
class Verdict:
    is_pseudo_hermitian: bool
    witness: MetricOperator | None = None
    failure_reason: PairingFailure | None = None
    decomposition: JordanDecomposition | None = field(default=None, repr=False)
    pairing: SpectrumPairing | None = field(default=None, repr=False)

    def __post_init__(self):
        if (self.witness is None) == (self.failure_reason is None):
            raise ValueError("a verdict carries exactly one of witness / failure_reason")


@dataclass(frozen=True)
class NullVector:
    cluster: int
    chain: int
    vector: np.ndarray
    norm: complex


def pair_spectrum(data, tol: Tolerances = DEFAULT_TOLERANCES, scale: float | None = None):
    """Split clusters into real ones and conjugate pairs.

    Returns a :class:`SpectrumPairing` on success, otherwise the first
    violated condition as an :class:`UnpairedEigenvalue` or
    :class:`JordanMismatch` value.  Upper clusters are matched in
    (real, imaginary) order to the nearest unmatched lower cluster within
    ``cluster_rel * scale`` of their conjugate.

    Raises
    ------
    AmbiguousClustering
        When more than one lower cluster is within the matching radius.
    """
    centers = np.array([d.eigenvalue for d in data], dtype=np.complex128)
    if scale is None:
        scale = spectral_scale(centers)
    real = [n for n, e in enumerate(centers) if abs(e.imag) <= tol.real_rel * scale]
    upper = sorted(
        (n for n, e in enumerate(centers) if e.imag > tol.real_rel * scale),
        key=lambda n: (centers[n].real, centers[n].imag),
    )
    lower = [n for n, e in enumerate(centers) if e.imag < -tol.real_rel * scale]
    radius = tol.cluster_rel * scale

    pairs = []
    for nu in upper:
        target = centers[nu].conjugate()
        near = [m for m in lower if abs(centers[m] - target) <= radius]
        if not near:
            return UnpairedEigenvalue(complex(centers[nu]), nu)
        if len(near) > 1:
            raise AmbiguousClustering(
                f"{len(near)} clusters lie within {radius:.3e} of conj({centers[nu]:.6g})"
            )
        mu = near[0]
        lower.remove(mu)
        if data[nu].jordan_dims != data[mu].jordan_dims:
            return JordanMismatch(nu, mu, data[nu].jordan_dims, data[mu].jordan_dims)
        pairs.append((nu, mu))
    if lower:
        first = min(lower, key=lambda m: (centers[m].real, centers[m].imag))
        return UnpairedEigenvalue(complex(centers[first]), first)
    return SpectrumPairing(tuple(real), tuple(pairs))


def verify_intertwining(H, eta, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``||eta H - H^H eta||_F / (||eta||_F ||H||_F)``; zero for a zero matrix."""
    H = np.asarray(H, dtype=np.complex128)
    eta = np.asarray(eta, dtype=np.complex128)
    if H.shape != eta.shape:
        raise DimensionMismatch(f"H has shape {H.shape}, eta has shape {eta.shape}")
    denom = np.linalg.norm(eta) * np.linalg.norm(H)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(eta @ H - adjoint(H) @ eta) / denom)


def hermiticity_residual(eta) -> float:
    eta = np.asarray(eta, dtype=np.complex128)
    norm = np.linalg.norm(eta)
    return float(np.linalg.norm(eta - adjoint(eta)) / norm) if norm else 0.0


def _metric(dec: JordanDecomposition, eta: np.ndarray, provenance: dict) -> MetricOperator:
    eta.setflags(write=False)
    return MetricOperator(
        eta=eta,
        provenance=provenance,
        hermiticity_residual=hermiticity_residual(eta),
        intertwining_residual=verify_intertwining(dec.matrix, eta),
        min_eigenvalue=float(np.linalg.eigvalsh((eta + adjoint(eta)) / 2)[0]),
    )


def _check_signs(dec, pairing, sigma) -> list:
    sigma = [int(s) for s in sigma]
    expected = len(pairing.real_chains(dec))
    if len(sigma) != expected:
        raise SignCountMismatch(f"expected {expected} sign(s), one per real chain; got {len(sigma)}")
    if any(s not in (1, -1) for s in sigma):
        raise SignCountMismatch(f"signs must be +1 or -1, got {sigma}")
    return sigma


def _flip_sum(basis: np.ndarray, dec, pairing, sigma) -> np.ndarray:
    out = np.zeros((dec.dim, dec.dim), dtype=np.complex128)
    for s, (n, a) in zip(sigma, pairing.real_chains(dec)):
        cols = dec.chain_columns(n, a)
        p = len(cols)
        for i in range(p):
            out += s * np.outer(basis[:, cols[i]], basis[:, cols[p - 1 - i]].conj())
    for nu, mu, a in pairing.pair_chains(dec):
        up, down = dec.chain_columns(nu, a), dec.chain_columns(mu, a)
        p = len(up)
        for i in range(p):
            term = np.outer(basis[:, up[i]], basis[:, down[p - 1 - i]].conj())
            out += term + adjoint(term)
    return out


def canonical_metric(dec: JordanDecomposition, pairing: SpectrumPairing, sigma: Sequence[int] | None = None) -> MetricOperator:
    """Canonical metric built from the dual basis with signs `sigma`.

    `sigma` holds one ``+1``/``-1`` per real chain in the order of
    :meth:`SpectrumPairing.real_chains`; ``None`` means all ``+1``.
    """
    if sigma is None:
        sigma = [1] * len(pairing.real_chains(dec))
    sigma = _check_signs(dec, pairing, sigma)
    eta = _flip_sum(dec.dual_basis, dec, pairing, sigma)
    return _metric(dec, eta, {"signs": tuple(sigma)})


def canonical_metric_inverse(dec: JordanDecomposition, pairing: SpectrumPairing, sigma: Sequence[int] | None = None) -> np.ndarray:
    """Inverse of :func:`canonical_metric`, the same flip sum over the chain basis."""
    if sigma is None:
        sigma = [1] * len(pairing.real_chains(dec))
    sigma = _check_signs(dec, pairing, sigma)
    return _flip_sum(dec.chain_basis, dec, pairing, sigma)


def general_metric(dec: JordanDecomposition, pairing: SpectrumPairing, x, xi) -> MetricOperator:
    """Metric from the free coefficients `x` (real chains) and `xi` (pairs).

    ``x[r]`` lists the real coefficients ``x_k`` for ``k = p+1, ..., 2p`` of
    the ``r``-th real chain (order of :meth:`SpectrumPairing.real_chains`);
    ``xi[r]`` lists complex ``xi_k`` for the ``r``-th pair chain (order of
    :meth:`SpectrumPairing.pair_chains`).  In the chain basis the result has
    entry ``x_{i+j}`` (one-based ``i, j``) wherever ``i + j > p``, zero
    elsewhere, and ``xi`` couples ``nu`` rows to ``nu-`` columns the same way.

    Raises
    ------
    IndexMismatch
        Wrong number of sequences or of coefficients, or non-real `x`.
    ZeroLeadingCoefficient
        ``x_{p+1}`` or ``xi_{p+1}`` vanishes (the metric would be singular).
    """
    real_chains, pair_chains = pairing.real_chains(dec), pairing.pair_chains(dec)
    if len(x) != len(real_chains) or len(xi) != len(pair_chains):
        raise IndexMismatch(
            f"need {len(real_chains)} x sequence(s) and {len(pair_chains)} xi sequence(s), "
            f"got {len(x)} and {len(xi)}"
        )
    coeffs = np.zeros((dec.dim, dec.dim), dtype=np.complex128)

    def place(rows, cols, values, label, real):
        p = len(rows)
        values = np.asarray(values, dtype=np.complex128).ravel()
        if len(values) != p:
            raise IndexMismatch(f"{label} needs {p} coefficients (k = {p + 1}..{2 * p}), got {len(values)}")
        if real and np.any(values.imag != 0):
            raise IndexMismatch(f"{label} coefficients must be real")
        if values[0] == 0:
            raise ZeroLeadingCoefficient(f"{label}: leading coefficient k = {p + 1} is zero")
        for i in range(p):
            for j in range(p - 1 - i, p):
                # zero-based i + j + 2 = k  =>  index k - (p + 1)
                coeffs[rows[i], cols[j]] = values[i + j + 1 - p]

    for r, (n, a) in enumerate(real_chains):
        cols = dec.chain_columns(n, a)
        place(cols, cols, x[r], f"x[{r}]", real=True)
    for r, (nu, mu, a) in enumerate(pair_chains):
        up, down = dec.chain_columns(nu, a), dec.chain_columns(mu, a)
        place(up, down, xi[r], f"xi[{r}]", real=False)
        block = coeffs[np.ix_(up, down)]
        coeffs[np.ix_(down, up)] = block.conj().T

    Phi = dec.dual_basis
    eta = Phi @ coeffs @ adjoint(Phi)
    provenance = {
        "x": tuple(tuple(float(v.real) for v in np.ravel(seq)) for seq in x),
        "xi": tuple(tuple(complex(v) for v in np.ravel(seq)) for seq in xi),
    }
    return _metric(dec, eta, provenance)


def canonical_coefficients(dec: JordanDecomposition, pairing: SpectrumPairing, sigma: Sequence[int] | None = None):
    """``(x, xi)`` that make :func:`general_metric` equal :func:`canonical_metric`.

    Only the leading coefficient of each chain is nonzero: ``sigma`` for
    real chains and ``1`` for pairs.
    """
    real_chains, pair_chains = pairing.real_chains(dec), pairing.pair_chains(dec)
    if sigma is None:
        sigma = [1] * len(real_chains)
    sigma = _check_signs(dec, pairing, sigma)
    x = [[float(s)] + [0.0] * (len(dec.chain_columns(n, a)) - 1) for s, (n, a) in zip(sigma, real_chains)]
    xi = [[1.0 + 0j] + [0j] * (len(dec.chain_columns(nu, a)) - 1) for nu, _, a in pair_chains]
    return x, xi


def psi_representation(dec: JordanDecomposition, eta) -> np.ndarray:
    """Matrix elements ``<psi_k|eta|psi_l>`` in the chain basis."""
    A = dec.chain_basis
    return adjoint(A) @ np.asarray(eta, dtype=np.complex128) @ A


def semidefinite_form(eta, u, v) -> complex:
    """``u^H eta v``: conjugate linear in `u`, linear in `v`."""
    eta = np.asarray(eta, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128).ravel()
    v = np.asarray(v, dtype=np.complex128).ravel()
    if eta.ndim != 2 or eta.shape[0] != eta.shape[1] or u.shape != (eta.shape[0],) or v.shape != u.shape:
        raise DimensionMismatch(f"eta {eta.shape}, u {u.shape}, v {v.shape}")
    return complex(np.vdot(u, eta @ v))


def check_metric_hermiticity(H, eta, samples: int, seed: int) -> float:
    """Largest normalized ``|<<phi, H psi>> - <<H phi, psi>>|`` over random pairs.

    Vectors are complex Gaussian draws from ``numpy.random.default_rng(seed)``;
    each difference is divided by ``||H||_2 ||eta||_2 ||phi|| ||psi||``.
    """
    H = np.asarray(H, dtype=np.complex128)
    eta = np.asarray(eta, dtype=np.complex128)
    if H.shape != eta.shape or H.ndim != 2:
        raise DimensionMismatch(f"H has shape {H.shape}, eta has shape {eta.shape}")
    n = H.shape[0]
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    psi = rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    lhs = np.einsum("ks,ks->s", phi.conj(), eta @ (H @ psi))
    rhs = np.einsum("ks,ks->s", (H @ phi).conj(), eta @ psi)
    scale = np.linalg.norm(H, 2) * np.linalg.norm(eta, 2)
    if scale == 0.0:
        return 0.0
    norms = np.linalg.norm(phi, axis=0) * np.linalg.norm(psi, axis=0)
    return float(np.max(np.abs(lhs - rhs) / (scale * norms)))


def null_vectors(dec: JordanDecomposition, pairing: SpectrumPairing, eta) -> list:
    """Eigenvectors that are null for ``<u|eta|u>``.

    These are the eigenvectors of real clusters sitting at the bottom of a
    chain longer than one, and every eigenvector of a conjugate-pair cluster.
    """
    out = []
    A = dec.chain_basis

    def add(n, a):
        v = A[:, dec.chain_columns(n, a)[0]]
        out.append(NullVector(n, a, v.copy(), semidefinite_form(eta, v, v)))

    for n, a in pairing.real_chains(dec):
        if len(dec.chain_columns(n, a)) > 1:
            add(n, a)
    for nu, mu in pairing.pair_map:
        for a in range(dec.data[nu].geometric_mult):
            add(nu, a)
            add(mu, a)
    return out


def check_pseudo_hermiticity(H, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Decide pseudo-Hermiticity from the Jordan structure of `H`.

    On success the witness is the canonical metric with all signs ``+1``.
    A ``RuntimeWarning`` is issued if its intertwining residual exceeds
    ``tol.verify_rel``.
    """
    H = as_cmatrix(H)
    dec = jordan_chains(H, tol)
    pairing = pair_spectrum(dec.data, tol)
    if not isinstance(pairing, SpectrumPairing):
        return Verdict(False, failure_reason=pairing, decomposition=dec)
    witness = canonical_metric(dec, pairing)
    if witness.intertwining_residual > tol.verify_rel:
        warnings.warn(
            f"metric intertwining residual {witness.intertwining_residual:.3e} exceeds "
            f"verify_rel={tol.verify_rel:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return Verdict(True, witness=witness, decomposition=dec, pairing=pairing)


def metric_inverse_residual(eta, eta_inv) -> float:
    """``||eta @ eta_inv - I||_F``."""
    eta = np.asarray(eta, dtype=np.complex128)
    return float(np.linalg.norm(eta @ np.asarray(eta_inv) - np.eye(eta.shape[0])))


def is_invertible(eta, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    try:
        inverse(eta, tol)
    except SingularMatrix:
        return False
    return True
