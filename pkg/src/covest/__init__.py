"""Structured covariance estimation and maximum-entropy spectral analysis.

Approximates a (possibly singular) sample covariance by the nearest positive
semidefinite Toeplitz matrix under several geometries -- transportation /
Bures-Hellinger distance via a semidefinite program, Gaussian likelihood, KL,
linearized log-deviation, trace-gap, and nuclear norm -- and turns estimates
into maximum-entropy power spectra.
"""

from .divergences import (
    CouplingSolution,
    MetricValue,
    ProcrustesResult,
    bures_hellinger,
    fisher_quadratic_gaussian,
    hellinger_procrustes,
    kl_gaussian,
    likelihood_divergence,
    log_deviation,
    optimal_coupling,
    rao_quadratic,
)
from .errors import (
    CovestError,
    DegenerateSignal,
    DimensionMismatch,
    InitInfeasible,
    NegativeEigenvalue,
    NotPositiveDefinite,
    NotToeplitz,
    PerturbationTooLarge,
    SingularData,
    SingularModel,
)
from .experiment import (
    ExperimentBundle,
    ExperimentConfig,
    ObservationSet,
    run_experiment,
    sample_covariance,
    spectral_line_record,
)
from .matops import EigDecomp, logm_spd, norms, project_psd, sqrtm_psd, sym_eig, symmetrize
from .solvers import (
    AdmmOptions,
    DescentOptions,
    SolveReport,
    SolveStatus,
    TransportResult,
    solve_coupling,
    solve_kl,
    solve_log_linear,
    solve_ml,
    solve_nuclear,
    solve_stoica,
    solve_transport,
    verify_nuclear_identity,
)
from .spectral import ARModel, SpectrumGrid, ar_from_covariance, burg_ar, find_peaks, levinson, me_spectrum
from .structure import (
    AdmissibilityCheck,
    LinearStructure,
    from_spanning_set,
    is_admissible,
    matrix_to_params,
    params_to_matrix,
    project_structure,
    toeplitz_structure,
)

__version__ = "0.1.0"
