from .eigen import (
    CoefficientMethod,
    CoefficientSet,
    EigenPair,
    biorthogonality_matrix,
    coefficients,
    completeness_residual,
    eigen_pair,
    eigenvalues,
    steady_state_vectors,
)
from .magic import MagicSumTable, magic_sum_exact, magic_sum_f, magic_sum_h
from .series import (
    SeriesEvaluator,
    boundary_tail,
    diverging_term_estimate,
    edge_kernel_term,
    first_term_rate,
    kernel_enters_explicitly,
    r_min,
    spectral_delta_direct,
    spectral_delta_series,
)
