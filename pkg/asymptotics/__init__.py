from .theta import (
    ThetaEval,
    lattice_log_derivative,
    theta1_dq,
    theta1_log_derivative,
    theta4_dq,
    theta4_dz,
    theta4_grid,
    theta4_rate_shape,
)
from .transition import (
    AsymptoteRegime,
    Regime,
    asymptote_half,
    asymptote_k2,
    rate_transition_half,
    rate_transition_k2,
    regime,
)
