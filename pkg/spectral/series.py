"""
Two representations of Delta I_k(t) = I_k(t) - [I_inf]_k built from the closed-form spectrum.

direct:  Delta I = a(t) - b(t), the j-sum with the 1/(lambda_ph - lambda_j) and 1/(1 - lambda_j) pieces
series:  Delta I = (4 alpha / n) sum_{r >= r_min} (2 alpha)^p f_k(p) (lambda_ph^-(r+1) - 1),  p = 2t + 2r + k - n + 1

Both drop boundary terms of relative size lambda_j^(n/2) unless include_boundary_tail is set,
in which case the exact resummed correction D(t) is added back.
"""
import logging
import math
from dataclasses import dataclass

import mpmath

from model.errors import ParameterError, ResourceLimitError
from model.params import ModelParams, timescales

from .eigen import default_dps, mp_alpha, projection_prefactor, to_mp
from .magic import MagicSumTable, magic_sum_mp

logger = logging.getLogger("phantomlab.spectral")

DEFAULT_SERIES_TOL = 1e-16
DEFAULT_MAX_TERMS = 1_000_000
MIN_SERIES_TERMS = 8
_DPS_CAP = 20_000


@dataclass(frozen=True)
class DirectEvaluation:
    value: float
    a: float
    b: float


def _guarded_sum(build_terms, dps: int) -> mpmath.mpf:
    """fsum of build_terms() with the working precision doubled until cancellation
    leaves at least 20 correct digits."""
    while True:
        with mpmath.workdps(dps):
            terms = build_terms()
            total = mpmath.fsum(terms)
            biggest = max((abs(x) for x in terms), default=mpmath.mpf(0))
            if biggest == 0:
                return total
            lost = float(mpmath.log10(biggest)) - (float(mpmath.log10(abs(total))) if total else -math.inf)
            if lost < dps - 20:
                return +total
        if dps >= _DPS_CAP:
            raise ResourceLimitError("cancellation exceeds the extended-precision cap", dps=dps)
        dps = min(2 * dps, _DPS_CAP)
        logger.debug(f"Raising working precision to {dps} digits")


def _check_time(t: int):
    if t < 0:
        raise ParameterError(f"t must be >= 0 (got {t})", t=t)


def _direct_terms(params: ModelParams, t: int, include_boundary_tail: bool):
    n = params.n
    m = n // 2 - 1
    lam_ph = to_mp(params.lambda_ph)
    alpha = mp_alpha(params)
    a_terms, b_terms = [], []
    for j in range(1, params.half + 1):
        lam = (2 * alpha * mpmath.cos(mpmath.pi * j / n)) ** 2
        weight = projection_prefactor(params, j) * lam**t
        if include_boundary_tail:
            edge = (-1) ** j * lam**m
            a_terms.append(weight * (1 - lam_ph * edge) / (lam_ph - lam))
            b_terms.append(weight * (1 - edge) / (1 - lam))
        else:
            a_terms.append(weight / (lam_ph - lam))
            b_terms.append(weight / (1 - lam))
    return a_terms, b_terms


def spectral_delta_direct(
    params: ModelParams, t: int, include_boundary_tail: bool = True, dps: int | None = None
) -> DirectEvaluation:
    """Full j-sum. Equals the true Delta I_k(t) for t > t_K; below that the kernel is missing."""
    _check_time(t)
    dps = dps or default_dps(params.n)

    def value_terms():
        a_terms, b_terms = _direct_terms(params, t, include_boundary_tail)
        return [x - y for x, y in zip(a_terms, b_terms)]

    value = _guarded_sum(value_terms, dps)
    with mpmath.workdps(dps):
        a_terms, b_terms = _direct_terms(params, t, include_boundary_tail)
        a, b = mpmath.fsum(a_terms), mpmath.fsum(b_terms)
    return DirectEvaluation(value=float(value), a=float(a), b=float(b))


def boundary_tail(params: ModelParams, t: int, dps: int | None = None) -> float:
    """D(t): the lambda_j^(n/2) corrections dropped by the closed-form coefficients."""
    _check_time(t)
    n = params.n

    def tail_terms():
        lam_ph = to_mp(params.lambda_ph)
        alpha = mp_alpha(params)
        out = []
        for j in range(1, params.half + 1):
            lam = (2 * alpha * mpmath.cos(mpmath.pi * j / n)) ** 2
            weight = projection_prefactor(params, j) * lam**t
            out.append(-weight * (-1) ** j * lam ** (n // 2) * (1 - lam_ph) / ((lam_ph - lam) * (1 - lam)))
        return out

    return float(_guarded_sum(tail_terms, dps or default_dps(n)))


def r_min(params: ModelParams, t: int) -> int:
    """First r kept once the kernel cancels the non-positive-p terms.

    At k = n - 1 (t_c = 0) the kernel does not cancel the lone p = 0 term, so the sum
    starts at r = 0 and the kernel enters explicitly through edge_kernel_term.
    """
    scales = timescales(params)
    if scales.t_c == 0:
        return 0
    return max(0, scales.t_K - t + 1)


def kernel_enters_explicitly(params: ModelParams) -> bool:
    return timescales(params).t_c == 0


def edge_kernel_term(params: ModelParams, t: int) -> float:
    """I_k^ker(t) where it is not absorbed by r_min: only k = n - 1 at t = 0."""
    if not kernel_enters_explicitly(params) or t > timescales(params).t_K:
        return 0.0
    from kernel.contribution import kernel_power_contribution

    return float(kernel_power_contribution(params, t))


def series_power(params: ModelParams, t: int, r: int) -> int:
    return 2 * t + 2 * r + params.k - params.n + 1


class SeriesEvaluator:
    """Terms of the f_k(p) series for one parameter set, sharing a magic-sum table."""

    def __init__(self, params: ModelParams, table: MagicSumTable | None = None):
        self.params = params
        self.table = table if table is not None else MagicSumTable(params.n)
        alpha = float(params.alpha)
        self._log_prefactor = math.log(4 * alpha / params.n)
        self._log_two_alpha = math.log(2 * alpha)
        self._log_lambda_ph = math.log(float(params.lambda_ph))
        self._negative_cache: dict[int, tuple[int, float]] = {}

    def _f_sign_log(self, p: int) -> tuple[int, float]:
        if p >= 0:
            return self.table.sign_log(self.params.k, p)
        if p not in self._negative_cache:
            value = magic_sum_mp(self.params.n, self.params.k, p)
            if value == 0:
                self._negative_cache[p] = (0, -math.inf)
            else:
                self._negative_cache[p] = (1 if value > 0 else -1, float(mpmath.log(abs(value))))
        return self._negative_cache[p]

    def term(self, t: int, r: int) -> float:
        p = series_power(self.params, t, r)
        sign, log_f = self._f_sign_log(p)
        if sign == 0:
            return 0.0
        # ln(lambda_ph^-(r+1) - 1)
        log_weight = -(r + 1) * self._log_lambda_ph + math.log1p(-math.exp((r + 1) * self._log_lambda_ph))
        log_term = self._log_prefactor + p * self._log_two_alpha + log_f + log_weight
        if log_term > 709.0:
            return sign * math.inf
        return sign * math.exp(log_term)

    def terms(self, t: int, r_start: int, r_stop: int) -> list[float]:
        return [self.term(t, r) for r in range(r_start, r_stop)]

    def total(
        self,
        t: int,
        include_kernel_renormalization: bool = True,
        tol: float = DEFAULT_SERIES_TOL,
        max_terms: int = DEFAULT_MAX_TERMS,
    ) -> float:
        _check_time(t)
        r = r_min(self.params, t) if include_kernel_renormalization else 0
        collected: list[float] = []
        partial = 0.0
        quiet = 0
        while True:
            term = self.term(t, r)
            collected.append(term)
            partial += term
            if term != 0.0 and abs(term) < tol * abs(partial):
                quiet += 1
            elif term != 0.0:
                quiet = 0
            if len(collected) >= MIN_SERIES_TERMS and quiet >= 2:
                break
            if len(collected) >= max_terms:
                raise ResourceLimitError("spectral series did not converge", t=t, terms=len(collected), tol=tol)
            r += 1
        logger.debug(f"Series at t={t}: {len(collected)} terms, p up to {series_power(self.params, t, r)}")
        return math.fsum(collected)


def spectral_delta_series(
    params: ModelParams,
    t: int,
    include_kernel_renormalization: bool = True,
    include_boundary_tail: bool = True,
    tol: float = DEFAULT_SERIES_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
    evaluator: SeriesEvaluator | None = None,
) -> float:
    """Delta I_k(t) from the magic-sum series.

    With renormalization the sum starts at r_min = max(0, t_K - t + 1), which is the
    true Delta I at every t; without it the sum starts at r = 0 and reproduces the
    kernel-free divergence for t <= t_K. At k = n - 1 the renormalized value carries
    the kernel term explicitly.
    """
    evaluator = evaluator or SeriesEvaluator(params)
    value = evaluator.total(t, include_kernel_renormalization, tol, max_terms)
    if include_kernel_renormalization:
        value += edge_kernel_term(params, t)
    if include_boundary_tail:
        value += boundary_tail(params, t)
    return value


def diverging_term_estimate(params: ModelParams, t: int) -> float:
    """(4 pi alpha / n)^(2t): shape of the kernel-free divergence, prefactor dropped."""
    t_K = timescales(params).t_K
    if not 0 <= t <= t_K:
        raise ParameterError(f"diverging-term estimate needs 0 <= t <= t_K={t_K} (got {t})", t=t)
    return (4 * math.pi * float(params.alpha) / params.n) ** (2 * t)


def first_term_rate(params: ModelParams, t: int, table: MagicSumTable | None = None) -> float:
    """lambda_eff(t) ~ (2 alpha)^2 f_k(p + 2) / f_k(p), p = 2t + k - n + 1, from the leading r = 0 term."""
    p = series_power(params, t, 0)
    if p < 0:
        raise ParameterError(f"leading series term has negative power p={p}; need t >= (n-k-1)/2", t=t)
    table = table or MagicSumTable(params.n)
    s0, l0 = table.sign_log(params.k, p)
    s2, l2 = table.sign_log(params.k, p + 2)
    if s0 == 0:
        raise ParameterError(f"f_k(p) vanishes at p={p}; t={t} lies inside the plateau", t=t, p=p)
    return (2 * float(params.alpha)) ** 2 * s0 * s2 * math.exp(l2 - l0)
