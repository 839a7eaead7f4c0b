"""Jordan chains, biorthonormal bases and metric operators for pseudo-Hermitian matrices."""

from .errors import *  # noqa: F401,F403
from .matcore import DEFAULT_TOLERANCES, Tolerances, as_cmatrix, eigenvalues, inverse, numerical_rank
from .jordan import (
    JordanDecomposition,
    SpectralDatum,
    canonical_form,
    cluster_spectrum,
    jordan_chains,
    kernel_dimension_sequence,
    reconstruct,
    segre_from_weyr,
)
from .pseudoherm import (
    JordanMismatch,
    MetricOperator,
    SpectrumPairing,
    UnpairedEigenvalue,
    Verdict,
    canonical_metric,
    canonical_metric_inverse,
    check_metric_hermiticity,
    check_pseudo_hermiticity,
    general_metric,
    null_vectors,
    pair_spectrum,
    semidefinite_form,
    verify_intertwining,
)
from .two_by_two import Class, CrossingFamily, Traceless2, classify, factorize, sweep_family
from .frw import FrwParams, analyze_frw, build_truncated_hamiltonian, critical_scale_factors, frw_eigenvalues, oscillator_level

__version__ = "0.1.0"
