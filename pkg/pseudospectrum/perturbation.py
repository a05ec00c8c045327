"""
Spectra of the Toeplitz core under a random perturbation, T(eps) = T + eps E.

Epsilons travel as decimal strings ("3.7e-12") or decade exponents ("10^-5.5") and are
only turned into numbers inside the solver's own precision context, so 10^-60 stays exact
to the working mantissa.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from model.errors import ParameterError, PrecisionError
from model.params import ModelParams
from model.propagator import ArithmeticMode, build_propagator
from model.rng import SeededStreams, check_seed

from .eigensolver import eigenvalues, frobenius_norm, make_context

logger = logging.getLogger("phantomlab.pseudospectrum")

DEFAULT_PRECISION_BITS = 256
DEFAULT_REAL_THRESHOLD = 1e-6
DECADE_PREFIX = "10^"


def parse_epsilon(ctx, value) -> mpmath.mpf:
    """Number of ctx for a decimal string, a "10^x" exponent string, an int or a Fraction."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, str) and value.startswith(DECADE_PREFIX):
        return ctx.power(10, ctx.mpf(value[len(DECADE_PREFIX):]))
    try:
        return ctx.mpf(value)
    except (TypeError, ValueError):
        raise ParameterError(f"cannot read epsilon '{value}'", epsilon=value) from None


def decade_grid(x_start, x_stop, x_step) -> tuple[str, ...]:
    """eps = 10^-x for x = x_start, x_start + x_step, ..., x_stop, as exponent strings in ascending eps."""
    start, stop, step = Fraction(str(x_start)), Fraction(str(x_stop)), Fraction(str(x_step))
    if step <= 0 or stop < start:
        raise ParameterError(
            f"decade grid needs step > 0 and stop >= start (got {x_start}:{x_step}:{x_stop})",
            start=x_start, stop=x_stop, step=x_step,
        )
    exponents = []
    x = start
    while x <= stop:
        exponents.append(x)
        x += step
    return tuple(f"{DECADE_PREFIX}-{_decimal(x)}" for x in reversed(exponents))


def _decimal(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return format(float(x), "g")


def log10_epsilon(value) -> float:
    ctx = make_context(64)
    eps = parse_epsilon(ctx, value)
    return float(ctx.log10(eps)) if eps > 0 else -math.inf


@dataclass(frozen=True)
class PerturbationConfig:
    params: ModelParams
    epsilons: tuple
    seed: int = 0
    realizations: int = 1
    precision_bits: int = DEFAULT_PRECISION_BITS
    real_threshold: float = DEFAULT_REAL_THRESHOLD
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(self.epsilons))
        errors = self.validate()
        if errors:
            raise ParameterError("; ".join(errors), n=self.params.n, d=self.params.d)

    def validate(self) -> list[str]:
        errors = []
        if not self.epsilons:
            errors.append("at least one epsilon is required")
        logs = []
        for eps in self.epsilons:
            try:
                logs.append(log10_epsilon(eps))
            except ParameterError as e:
                errors.append(str(e))
        if any(not math.isfinite(x) for x in logs):
            errors.append("epsilons must be positive")
        elif any(a >= b for a, b in zip(logs, logs[1:])):
            errors.append("epsilons must be sorted in strictly increasing order")
        try:
            check_seed(self.seed)
        except ParameterError as e:
            errors.append(str(e))
        if self.realizations < 1:
            errors.append(f"realizations must be >= 1 (got {self.realizations})")
        if self.precision_bits < 53:
            errors.append(f"precision_bits must be >= 53 (got {self.precision_bits})")
        if self.real_threshold <= 0:
            errors.append(f"real_threshold must be positive (got {self.real_threshold})")
        if self.threads < 1:
            errors.append(f"threads must be >= 1 (got {self.threads})")
        return errors


@dataclass(frozen=True)
class SpectrumSnapshot:
    epsilon: str
    realization: int
    eigenvalues: tuple      # n-2 complex numbers at the solver's precision
    real_mask: tuple[bool, ...]
    precision_bits: int

    @property
    def real_count(self) -> int:
        return sum(self.real_mask)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(z) for z in self.eigenvalues])

    def rows(self) -> list[dict]:
        digits = max(17, int(self.precision_bits * math.log10(2)) // 2)
        return [
            {
                "epsilon": self.epsilon,
                "realization": self.realization,
                "re": mpmath.nstr(mpmath.re(z), digits),
                "im": mpmath.nstr(mpmath.im(z), digits),
                "real": real,
            }
            for z, real in zip(self.eigenvalues, self.real_mask)
        ]


@dataclass
class SweepResult:
    config: PerturbationConfig
    snapshots: list[SpectrumSnapshot] = field(default_factory=list)

    def summary(self) -> list[dict]:
        """One row per epsilon: per-realization counts, their mean, and the theory curve."""
        rows = []
        for eps in self.config.epsilons:
            counts = [s.real_count for s in self.snapshots if s.epsilon == eps]
            rows.append({
                "epsilon": eps,
                "log10_epsilon": log10_epsilon(eps),
                "real_count": counts[0] if len(counts) == 1 else None,
                "mean_real_count": float(np.mean(counts)),
                "theory_count": theory_real_count(self.config.params, eps),
            })
        return rows


def sample_perturbation(n: int, seed: int, realization: int) -> np.ndarray:
    """(n-2) x (n-2) standard normals from the Philox stream keyed by (seed, realization)."""
    if n < 4:
        raise ParameterError(f"n must be >= 4 (got {n})", n=n)
    return SeededStreams(seed).stream(realization).standard_normal((n - 2, n - 2))


def _core_rows(ctx, params: ModelParams) -> list[list]:
    T = build_propagator(params, ArithmeticMode.RATIONAL).T
    return [[ctx.mpf(x.numerator) / x.denominator for x in row] for row in T]


def perturbed_spectrum(config: PerturbationConfig, epsilon, realization: int = 0) -> SpectrumSnapshot:
    """All n-2 eigenvalues of T + eps E at config.precision_bits. eps = 0 gives T alone."""
    params = config.params
    n = params.n
    ctx = make_context(config.precision_bits)
    eps = parse_epsilon(ctx, epsilon)
    if eps < 0:
        raise ParameterError(f"epsilon must be >= 0 (got {epsilon})", epsilon=epsilon)

    rows = _core_rows(ctx, params)
    if eps > 0:
        floor = ctx.ldexp(frobenius_norm(ctx, rows), -config.precision_bits)
        if eps < floor:
            raise PrecisionError(
                f"epsilon={epsilon} is below what {config.precision_bits} mantissa bits resolve against |T|",
                epsilon=epsilon, bits=config.precision_bits, floor=ctx.nstr(floor, 5),
            )
        E = sample_perturbation(n, config.seed, realization)
        rows = [[t + eps * ctx.mpf(float(e)) for t, e in zip(row, erow)] for row, erow in zip(rows, E)]

    values = eigenvalues(ctx, rows)
    cloud = ctx.power(eps, ctx.mpf(2) / (n - 2)) if eps > 0 else ctx.zero
    threshold = ctx.mpf(config.real_threshold)
    real_mask = tuple(bool(abs(ctx.im(z)) < threshold * max(abs(z), cloud)) for z in values)
    snapshot = SpectrumSnapshot(
        epsilon=epsilon if isinstance(epsilon, str) else str(epsilon),
        realization=realization,
        eigenvalues=tuple(values),
        real_mask=real_mask,
        precision_bits=config.precision_bits,
    )
    logger.debug(f"n={n} eps={snapshot.epsilon} realization={realization}: {snapshot.real_count} real")
    return snapshot


def theory_real_count(params: ModelParams, epsilon) -> float:
    """(n/pi) arccos(eps^(1/(n-2)) / (2 alpha)); 0 once the argument exceeds 1."""
    ctx = make_context(128)
    eps = parse_epsilon(ctx, epsilon)
    if eps <= 0:
        raise ParameterError(f"theory count needs eps > 0 (got {epsilon})", epsilon=epsilon)
    ratio = ctx.exp(ctx.log(eps) / (params.n - 2)) / (2 * ctx.mpf(params.alpha.numerator) / params.alpha.denominator)
    if ratio >= 1:
        return 0.0
    return float(params.n / ctx.pi * ctx.acos(ratio))


def collision_epsilon(params: ModelParams, j: int) -> float:
    """eps at which lambda_j reaches the kernel cloud: lambda_j^(n/2-1)."""
    if not 1 <= j <= params.half:
        raise ParameterError(f"j must satisfy 1 <= j <= n/2-1={params.half} (got {j})", j=j)
    mu = 2 * float(params.alpha) * math.cos(math.pi * j / params.n)
    return math.exp(2 * params.half * math.log(abs(mu)))


def kernel_cloud_radius(snapshot: SpectrumSnapshot, params: ModelParams) -> float:
    """Mean modulus of the n/2-1 eigenvalues closest to zero."""
    moduli = sorted(abs(z) for z in snapshot.eigenvalues)
    return float(mpmath.fsum(moduli[: params.half]) / params.half)


def sweep(config: PerturbationConfig) -> SweepResult:
    """Every (epsilon, realization) job, merged in epsilon order then realization order."""
    jobs = [(eps, r) for eps in config.epsilons for r in range(config.realizations)]
    logger.info(
        f"Pseudospectrum sweep n={config.params.n} d={config.params.d}: "
        f"{len(config.epsilons)} epsilons x {config.realizations} realizations at {config.precision_bits} bits"
    )
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            snapshots = list(pool.map(lambda job: perturbed_spectrum(config, *job), jobs))
    else:
        snapshots = [perturbed_spectrum(config, eps, r) for eps, r in jobs]
    result = SweepResult(config=config, snapshots=snapshots)
    logger.info(f"Sweep finished: {len(snapshots)} spectra")
    return result
