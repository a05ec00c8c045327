"""
Transition of lambda_eff from lambda_ph to lambda_1 after t_c, for the cuts k = 2 and k = n/2,
plus the short-time power laws and long-time exponentials of both curves.
"""
import logging
import math
from enum import Enum

from model.errors import ParameterError
from model.params import ModelParams, timescales

from .theta import SMALL_NOME, lattice_log_derivative, small_nome_rate_shape, theta4_rate_shape

logger = logging.getLogger("phantomlab.asymptotics")


class Regime(Enum):
    PLATEAU = "plateau"
    TRANSITION = "transition"
    ASYMPTOTIC = "asymptotic"


class AsymptoteRegime(Enum):
    SHORT = "short"
    LONG = "long"


# t / n^2 beyond which the long-time exponential holds to ~10%
LONG_TIME_ONSET = {"k2": 0.15, "half": 0.05}


def _prefactor(params: ModelParams) -> float:
    return (2 * float(params.alpha)) ** 2 * (math.pi / params.n) ** 2


def _check_after_plateau(params: ModelParams, t: int):
    t_c = timescales(params).t_c
    if t < t_c:
        raise ParameterError(f"transition curves start at t_c={t_c} (got t={t})", t=t, t_c=t_c)


def rate_transition_k2(params: ModelParams, t: int) -> float:
    """Delta lambda_eff(t) = lambda_eff - lambda_1 for k = 2:
    -(2 alpha)^2 (pi/n)^2 c^2 q theta4''(q) / theta4'(q), q = c^(2t-n+4), c = cos(pi/n)."""
    if params.k != 2:
        raise ParameterError(f"rate_transition_k2 needs k = 2 (got k={params.k})", k=params.k)
    _check_after_plateau(params, t)
    c = math.cos(math.pi / params.n)
    L = -(2 * t - params.n + 4) * math.log(c)
    if math.exp(-L) < SMALL_NOME:
        logger.warning(f"k=2 transition at t={t}: nome below {SMALL_NOME:g}, using the long-time form")
        shape = small_nome_rate_shape(L)
    else:
        shape = theta4_rate_shape(L)
    return _prefactor(params) * c * c * shape


def rate_transition_half(params: ModelParams, t: int) -> float:
    """Delta lambda_eff(t) for k = n/2: (2 alpha)^2 (pi/n)^2 [1 + theta1_zz/theta1](pi/n, c^(8t-2n+4))."""
    if params.k != params.n // 2:
        raise ParameterError(f"rate_transition_half needs k = n/2 (got k={params.k})", k=params.k)
    _check_after_plateau(params, t)
    c = math.cos(math.pi / params.n)
    q = c ** (8 * t - 2 * params.n + 4)
    return _prefactor(params) * lattice_log_derivative(math.pi / params.n, q)


def _regime(regime) -> AsymptoteRegime:
    try:
        return AsymptoteRegime(regime) if isinstance(regime, str) else regime
    except ValueError:
        raise ParameterError(f"regime must be 'short' or 'long' (got '{regime}')", regime=regime) from None


def asymptote_k2(params: ModelParams, t: float, regime, exponential_shape: bool = False) -> float:
    """short: (2 alpha)^2 (n/t)^2 / 4; long: 12 (2 alpha)^2 (pi/n)^2 cos(pi/n)^(6t)."""
    regime = _regime(regime)
    two_alpha_sq = (2 * float(params.alpha)) ** 2
    n = params.n
    if regime is AsymptoteRegime.SHORT:
        if t <= 0:
            raise ParameterError("short-time asymptote needs t > 0", t=t)
        return two_alpha_sq * (n / t) ** 2 / 4
    decay = math.exp(-3 * math.pi**2 * t / n**2) if exponential_shape else math.cos(math.pi / n) ** (6 * t)
    return 12 * _prefactor(params) * decay


def asymptote_half(params: ModelParams, t: float, regime, exponential_shape: bool = False) -> float:
    """short: (2 alpha)^2 (1/24 + 1/(8 pi^2)) (n/t)^2; long: 24 (2 alpha)^2 (pi/n)^2 cos(pi/n)^(16t)."""
    regime = _regime(regime)
    two_alpha_sq = (2 * float(params.alpha)) ** 2
    n = params.n
    if regime is AsymptoteRegime.SHORT:
        if t <= 0:
            raise ParameterError("short-time asymptote needs t > 0", t=t)
        return two_alpha_sq * (1 / 24 + 1 / (8 * math.pi**2)) * (n / t) ** 2
    decay = math.exp(-8 * math.pi**2 * t / n**2) if exponential_shape else math.cos(math.pi / n) ** (16 * t)
    return 24 * _prefactor(params) * decay


def regime(params: ModelParams, t: int) -> Regime:
    """plateau before t_c, asymptotic past the empirical long-time onset, transition between."""
    if t < timescales(params).t_c:
        return Regime.PLATEAU
    key = "half" if params.k == params.n // 2 else "k2"
    if t >= LONG_TIME_ONSET[key] * params.n**2:
        return Regime.ASYMPTOTIC
    return Regime.TRANSITION
