import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import mismatched_instance, pseudo_hermitian_instance, unpaired_instance
from pseudojordan.errors import DimensionMismatch, IndexMismatch, SignCountMismatch, ZeroLeadingCoefficient
from pseudojordan.jordan import SpectralDatum, jordan_chains
from pseudojordan.matcore import adjoint
from pseudojordan.pseudoherm import (
    JordanMismatch,
    SpectrumPairing,
    UnpairedEigenvalue,
    canonical_coefficients,
    canonical_metric,
    canonical_metric_inverse,
    check_metric_hermiticity,
    check_pseudo_hermiticity,
    general_metric,
    hermiticity_residual,
    metric_inverse_residual,
    null_vectors,
    pair_spectrum,
    psi_representation,
    semidefinite_form,
    verify_intertwining,
)

J2 = np.array([[0, 1], [0, 0]], dtype=complex)
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


def datum(e, dims):
    dims = tuple(sorted(dims, reverse=True))
    weyr, total = [], 0
    for level in range(1, dims[0] + 1):
        total += sum(1 for p in dims if p >= level)
        weyr.append(total)
    return SpectralDatum(complex(e), tuple(weyr), dims)


def setup(H):
    dec = jordan_chains(H)
    pairing = pair_spectrum(dec.data)
    assert isinstance(pairing, SpectrumPairing)
    return dec, pairing


# ---------------------------------------------------------------- pairing


def test_pair_real_spectrum():
    p = pair_spectrum([datum(-1, [1]), datum(1, [1])])
    assert p == SpectrumPairing((0, 1), ())


def test_pair_conjugates():
    p = pair_spectrum([datum(-1j, [1]), datum(1j, [1])])
    assert p == SpectrumPairing((), ((1, 0),))


def test_pair_jordan_mismatch():
    p = pair_spectrum([datum(-2j, [1, 1]), datum(2j, [2])])
    assert isinstance(p, JordanMismatch)
    assert p.upper_dims == (2,) and p.lower_dims == (1, 1)


def test_pair_unpaired():
    p = pair_spectrum([datum(1j, [1]), datum(2j, [1])])
    assert isinstance(p, UnpairedEigenvalue)


# ---------------------------------------------------------------- verdicts


def test_verdict_nilpotent():
    v = check_pseudo_hermiticity(J2)
    assert v.is_pseudo_hermitian
    assert np.array_equal(v.witness.eta, SWAP)
    assert np.array_equal(SWAP @ J2, adjoint(J2) @ SWAP)


def test_verdict_unpaired():
    v = check_pseudo_hermiticity(np.diag([1j, 2j]))
    assert not v.is_pseudo_hermitian
    assert isinstance(v.failure_reason, UnpairedEigenvalue)
    assert v.witness is None


def test_verdict_hermitian():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    H = m + adjoint(m)
    v = check_pseudo_hermiticity(H)
    assert v.is_pseudo_hermitian
    assert v.witness.intertwining_residual <= 1e-8
    assert v.witness.is_positive_definite


# ---------------------------------------------------------------- canonical metric


def test_canonical_metric_examples():
    dec, p = setup(np.diag([1, -1]))
    assert np.allclose(canonical_metric(dec, p, [1, 1]).eta, np.eye(2), atol=1e-15)
    dec, p = setup(J2)
    assert np.array_equal(canonical_metric(dec, p, [1]).eta, SWAP)
    dec, p = setup(np.diag([1j, -1j]))
    eta = canonical_metric(dec, p).eta
    assert np.allclose(eta, SWAP, atol=1e-15)
    assert np.allclose(eta @ np.diag([1j, -1j]), np.array([[0, -1j], [1j, 0]]))


def test_canonical_metric_inverse_examples():
    dec, p = setup(np.diag([1, -1]))
    assert np.allclose(canonical_metric_inverse(dec, p, [1, 1]), np.eye(2), atol=1e-15)
    dec, p = setup(J2)
    inv = canonical_metric_inverse(dec, p)
    assert np.array_equal(inv, SWAP)
    assert np.array_equal(SWAP @ inv, np.eye(2))


def test_sign_count_checked():
    dec, p = setup(np.diag([1, -1]))
    with pytest.raises(SignCountMismatch):
        canonical_metric(dec, p, [1])
    with pytest.raises(SignCountMismatch):
        canonical_metric_inverse(dec, p, [1, 1, 1])
    with pytest.raises(SignCountMismatch):
        canonical_metric(dec, p, [1, 2])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_sign_choice_intertwines(seed):
    inst = pseudo_hermitian_instance(np.random.default_rng(seed), max_dim=8)
    dec, p = setup(inst.H)
    chains = len(p.real_chains(dec))
    if chains > 4:
        return
    for sigma in itertools.product([1, -1], repeat=chains):
        m = canonical_metric(dec, p, sigma)
        assert m.intertwining_residual <= 1e-8
        assert m.hermiticity_residual <= 1e-12 * np.linalg.norm(m.eta)
        assert metric_inverse_residual(m.eta, canonical_metric_inverse(dec, p, sigma)) <= 1e-8 * dec.dim


# ---------------------------------------------------------------- general metric


def test_general_metric_reproduces_canonical_on_nilpotent():
    dec, p = setup(J2)
    x, xi = canonical_coefficients(dec, p)
    assert x == [[1.0, 0.0]] and xi == []
    assert np.array_equal(general_metric(dec, p, x, xi).eta, canonical_metric(dec, p).eta)


def test_general_metric_free_coefficients():
    dec, p = setup(J2)
    m = general_metric(dec, p, [[1, 5]], [])
    assert np.array_equal(psi_representation(dec, m.eta), np.array([[0, 1], [1, 5]]))
    assert m.intertwining_residual == 0.0


def test_general_metric_errors():
    dec, p = setup(J2)
    with pytest.raises(ZeroLeadingCoefficient):
        general_metric(dec, p, [[0, 5]], [])
    with pytest.raises(IndexMismatch):
        general_metric(dec, p, [[1]], [])
    with pytest.raises(IndexMismatch):
        general_metric(dec, p, [[1, 2]], [[1]])
    with pytest.raises(IndexMismatch):
        general_metric(dec, p, [[1, 2j]], [])
    dec, p = setup(np.diag([1j, -1j]))
    with pytest.raises(ZeroLeadingCoefficient):
        general_metric(dec, p, [], [[0]])


def pattern_residual(dec, p, x, xi, eta):
    """Max deviation of the chain-basis matrix from the expected coefficient pattern."""
    rep = psi_representation(dec, eta)
    expected = np.zeros_like(rep)
    for r, (n, a) in enumerate(p.real_chains(dec)):
        cols = dec.chain_columns(n, a)
        q = len(cols)
        for i in range(1, q + 1):
            for j in range(1, q + 1):
                if i + j > q:
                    expected[cols[i - 1], cols[j - 1]] = x[r][i + j - q - 1]
    for r, (nu, mu, a) in enumerate(p.pair_chains(dec)):
        up, down = dec.chain_columns(nu, a), dec.chain_columns(mu, a)
        q = len(up)
        for i in range(1, q + 1):
            for j in range(1, q + 1):
                if i + j > q:
                    expected[up[i - 1], down[j - 1]] = xi[r][i + j - q - 1]
                    expected[down[j - 1], up[i - 1]] = np.conj(xi[r][i + j - q - 1])
    return float(np.max(np.abs(rep - expected)))


def random_coefficients(rng, dec, p):
    x = [list(rng.uniform(0.5, 2, len(dec.chain_columns(n, a))) * rng.choice([-1, 1])) for n, a in p.real_chains(dec)]
    xi = [list(rng.standard_normal(len(dec.chain_columns(nu, a))) + 1j * rng.standard_normal(len(dec.chain_columns(nu, a))) + 1)
          for nu, _, a in p.pair_chains(dec)]
    return x, xi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_general_metric_pattern_and_intertwining(seed):
    rng = np.random.default_rng(seed)
    inst = pseudo_hermitian_instance(rng)
    dec, p = setup(inst.H)
    x, xi = random_coefficients(rng, dec, p)
    m = general_metric(dec, p, x, xi)
    assert m.intertwining_residual <= 1e-8
    assert hermiticity_residual(m.eta) <= 1e-12 * np.linalg.norm(m.eta)
    assert pattern_residual(dec, p, x, xi, m.eta) <= 1e-8


# ---------------------------------------------------------------- intertwining and forms


def test_verify_intertwining_examples():
    rng = np.random.default_rng(4)
    m = rng.standard_normal((3, 3))
    assert verify_intertwining(m + m.T, np.eye(3)) <= 1e-16
    assert verify_intertwining(J2, SWAP) == 0.0
    r = verify_intertwining(np.diag([1j, 2j]), np.eye(2))
    assert r == pytest.approx(np.linalg.norm(np.diag([2j, 4j])) / (np.sqrt(2) * np.sqrt(5)))
    with pytest.raises(DimensionMismatch):
        verify_intertwining(np.eye(2), np.eye(3))


def test_semidefinite_form_examples():
    e1, e2 = np.array([1, 0]), np.array([0, 1])
    u, v = np.array([1 + 2j, 3]), np.array([1j, -1])
    assert semidefinite_form(np.eye(2), u, v) == np.vdot(u, v)
    assert semidefinite_form(SWAP, e1, e1) == 0
    assert semidefinite_form(SWAP, e2, e2) == 0
    assert semidefinite_form(SWAP, e1 + e2, e1 + e2) == 2
    # conjugate linear in the first slot
    assert semidefinite_form(SWAP, 1j * (e1 + e2), e1 + e2) == -2j
    with pytest.raises(DimensionMismatch):
        semidefinite_form(SWAP, np.ones(3), np.ones(3))


def test_metric_hermiticity_examples():
    rng = np.random.default_rng(8)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert check_metric_hermiticity(m + adjoint(m), np.eye(4), 100, 0) <= 1e-13
    assert check_metric_hermiticity(J2, SWAP, 100, 0) <= 1e-13
    assert check_metric_hermiticity(np.diag([1j, 2j]), np.eye(2), 100, 0) > 0.1
    assert check_metric_hermiticity(J2, SWAP, 10, 3) == check_metric_hermiticity(J2, SWAP, 10, 3)


def test_null_vector_examples():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((3, 3))
    dec, p = setup(m + m.T)
    assert null_vectors(dec, p, canonical_metric(dec, p).eta) == []

    dec, p = setup(J2)
    nulls = null_vectors(dec, p, canonical_metric(dec, p).eta)
    assert len(nulls) == 1
    assert np.array_equal(nulls[0].vector, [1, 0]) and nulls[0].norm == 0

    dec, p = setup(np.diag([1j, -1j]))
    nulls = null_vectors(dec, p, canonical_metric(dec, p).eta)
    assert len(nulls) == 2 and all(abs(n.norm) <= 1e-15 for n in nulls)


# ---------------------------------------------------------------- biconditional


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_biconditional(seed):
    rng = np.random.default_rng(seed)
    for make in (pseudo_hermitian_instance, unpaired_instance, mismatched_instance):
        inst = make(rng, 8)
        v = check_pseudo_hermiticity(inst.H)
        assert v.is_pseudo_hermitian == (inst.expected_reason is None)
        if v.is_pseudo_hermitian:
            assert v.witness.intertwining_residual <= 1e-8
        else:
            assert type(v.failure_reason).__name__ == inst.expected_reason


def test_verdict_requires_one_outcome():
    from pseudojordan.pseudoherm import Verdict

    with pytest.raises(ValueError):
        Verdict(True)
