from .config import Config
from .errors import (
    ConvergenceError,
    DomainError,
    ParameterError,
    PhantomLabError,
    PrecisionError,
    ResourceLimitError,
)
from .params import ModelParams, Timescales, characteristic_rates, make_params, timescales
from .propagator import (
    ArithmeticMode,
    Propagator,
    PurityVector,
    Trajectory,
    build_propagator,
    delta_purity,
    effective_rate,
    iterate_trajectory,
    steady_state,
)
