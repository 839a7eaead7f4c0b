import cmath

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudojordan.errors import IndexOutOfRange
from pseudojordan.frw import (
    FrwParams,
    analyze_frw,
    block_sigma3,
    build_truncated_hamiltonian,
    critical_scale_factors,
    frw_eigenvalues,
    oscillator_level,
)
from pseudojordan.matcore import eigenvalues
from pseudojordan.pseudoherm import verify_intertwining
from pseudojordan.two_by_two import Class


def multiset_distance(got, want) -> float:
    cost = np.abs(np.subtract.outer(np.asarray(got), np.asarray(want)))
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def test_oscillator_level_examples():
    assert oscillator_level(FrwParams(1, 1, 2), 0) == 0
    assert oscillator_level(FrwParams(1, 1, 2), 1) == 2
    assert oscillator_level(FrwParams(1, 2, 1), 0) == -8
    with pytest.raises(IndexOutOfRange):
        oscillator_level(FrwParams(1, 1, 2), 2)


def test_eigenvalue_examples():
    assert frw_eigenvalues(FrwParams(1, 1, 1), 0) == (0, 0)
    plus, minus = frw_eigenvalues(FrwParams(1, 1, 2), 1)
    assert plus == pytest.approx(np.sqrt(2)) and minus == -plus
    plus, minus = frw_eigenvalues(FrwParams(1, 2, 1), 0)
    assert plus == pytest.approx(2j * np.sqrt(2)) and minus == -plus
    # a sqrt(a (m (2n+1) - a)) agrees with sqrt(d_n)
    assert plus == pytest.approx(2 * cmath.sqrt(2 * (1 - 2)))


def test_params_validated():
    for bad in ((0, 1, 1), (1, -1, 1), (1, 1, 0)):
        with pytest.raises(ValueError):
            FrwParams(*bad)


def test_nilpotent_single_level():
    H = build_truncated_hamiltonian(FrwParams(1, 1, 1))
    assert np.array_equal(H, 0.5 * np.array([[1, -1], [1, -1]]))
    report = analyze_frw(FrwParams(1, 1, 1))
    assert report.verdict.is_pseudo_hermitian and report.verdict.witness is not None
    assert report.level_classes == (Class.NILPOTENT,)


def test_two_levels_spectrum():
    e = np.sort_complex(eigenvalues(build_truncated_hamiltonian(FrwParams(1, 1, 2))))
    assert np.allclose(e, [-np.sqrt(2), 0, 0, np.sqrt(2)], atol=1e-7)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5, allow_nan=False))
def test_block_traceless_with_det(d):
    H = build_truncated_hamiltonian(FrwParams(1.0, 1.0, 1))
    from pseudojordan.frw import level_block

    B = level_block(d)
    assert np.trace(B) == 0
    assert np.linalg.det(B) == pytest.approx(-d, abs=1e-12 * max(1, d * d))
    assert H.shape == (2, 2)


def test_critical_scale_factors():
    assert critical_scale_factors(FrwParams(1, 1, 3)) == [1, 3, 5]
    assert critical_scale_factors(FrwParams(0.5, 1, 2)) == [0.5, 1.5]
    assert critical_scale_factors(FrwParams(2, 1, 1)) == [2]


def test_analyze_critical_example():
    r = analyze_frw(FrwParams(1, 3, 3))
    assert [lv.d_n for lv in r.levels] == [-54, 0, 54]
    assert r.critical_levels == [1]
    assert r.level_classes == (Class.MPLUS, Class.NILPOTENT, Class.MMINUS)
    (zero,) = r.zero_clusters
    assert (zero.geometric_mult, zero.algebraic_mult, zero.jordan_dims) == (1, 2, (2,))
    others = [d for d in r.decomposition.data if d is not zero]
    assert all(d.jordan_dims == (1,) for d in others)
    assert r.verdict.is_pseudo_hermitian
    assert r.sigma3_residual <= 1e-12


def test_analyze_subcritical_example():
    r = analyze_frw(FrwParams(1, 0.5, 4))
    assert all(lv.d_n > 0 for lv in r.levels)
    assert r.decomposition.is_diagonalizable and r.verdict.is_pseudo_hermitian
    assert all(abs(d.eigenvalue.imag) == 0 or abs(d.eigenvalue.imag) < 1e-12 for d in r.decomposition.data)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.1, 4), st.integers(1, 16))
def test_spectrum_and_sigma3(m, a, N):
    p = FrwParams(m, a, N)
    H = build_truncated_hamiltonian(p)
    assert verify_intertwining(H, block_sigma3(N)) <= 1e-12
    got = eigenvalues(H)
    want = [z for n in range(N) for z in frw_eigenvalues(p, n)]
    radius = max(1.0, np.max(np.abs(want)))
    # a defective level splits like sqrt(roundoff); that case is covered by the pipeline tests
    critical = any(abs(oscillator_level(p, n)) < 1e-6 * max(1, a**4) for n in range(N))
    if not critical:
        assert multiset_distance(got, want) / radius <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.0, 1.0), st.integers(1, 12))
def test_real_spectrum_below_mass(m, frac, N):
    p = FrwParams(m, max(frac * m, 1e-3), N)
    assert all(oscillator_level(p, n) >= 0 for n in range(N))
    e = eigenvalues(build_truncated_hamiltonian(p))
    radius = max(1.0, float(np.max(np.abs(e))))
    # imaginary parts are roundoff, or sqrt(roundoff) for an exactly critical level
    assert np.max(np.abs(e.imag)) <= 1e-7 * radius


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.05, 1.0), st.integers(1, 12))
def test_pipeline_real_below_mass(m, frac, N):
    # level gaps d_n stay well above the rank threshold for a >= 0.05
    r = analyze_frw(FrwParams(m, max(frac * m, 0.05), N))
    assert r.verdict.is_pseudo_hermitian
    assert r.verdict.pairing.pair_map == ()


@pytest.mark.parametrize("m,N", [(1.0, 3), (0.5, 4), (2.0, 2)])
def test_criticality_iff_defective(m, N):
    for n, a in enumerate(critical_scale_factors(FrwParams(m, 1, N))):
        r = analyze_frw(FrwParams(m, a, N))
        assert n in r.critical_levels
        assert [d.jordan_dims for d in r.zero_clusters] == [(2,)]
        complex_clusters = [d for d in r.decomposition.data if abs(d.eigenvalue.imag) > 1e-8]
        assert all(d.jordan_dims == (1,) * len(d.jordan_dims) for d in complex_clusters)
    r = analyze_frw(FrwParams(m, 1.3 * m + 0.01, N))
    assert r.critical_levels == [] and r.decomposition.is_diagonalizable
