"""Spectral-gap extraction from imaginary-time-evolved expectation values."""

from .operators import (
    LogScaledComplex,
    SparseOperator,
    commutator,
    expectation,
    nested_commutator_binomial,
    nested_commutator_recursive,
)
from .evolution import (
    LogScaledState,
    Trajectory,
    compute_trajectory,
    propagate_exact,
    propagate_stepped,
)
from .models import (
    HubbardSpec,
    SectorBasis,
    SpinChainSpec,
    fermi_hubbard_hamiltonian,
    fh_observable,
    jordan_wigner_ops,
    random_initial_state,
    tfim_hamiltonian,
    tfim_observable,
)
from .estimators import (
    FitWindow,
    GapEstimate,
    PreAsymptoticError,
    fit_line,
    gap_from_ratio,
    relative_error,
    second_gap,
    select_tau,
    sum_from_log_slope,
)
from .oracle import (
    SpectralDecomposition,
    exact_gaps,
    expectation_via_decomposition,
    spectral_decomposition,
    support_check,
)

__version__ = "0.1.0"
