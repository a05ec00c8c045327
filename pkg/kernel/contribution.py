"""
Kernel contribution to purity and its cancellation against the non-positive-p spectral terms.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from model.errors import ParameterError
from model.params import ModelParams, timescales
from model.propagator import ArithmeticMode, delta_purity, iterate_trajectory
from spectral.series import SeriesEvaluator, boundary_tail, kernel_enters_explicitly

from .basis import lifted_basis

logger = logging.getLogger("phantomlab.kernel")

DEFAULT_CANCELLATION_TOL = 1e-10
DEFAULT_IDENTITY_TOL = 1e-8


def kernel_power_contribution(params: ModelParams, t: int) -> Fraction:
    """I_k^ker(t) = sum_p [r_p^A]_k <l_{p+t}^A | I(0)>, exact."""
    if t < 0:
        raise ParameterError(f"t must be >= 0 (got {t})", t=t)
    basis = lifted_basis(params)
    k = params.k
    total = Fraction(0)
    for p in range(1, basis.dimension - t + 1):
        weight = basis.right[p - 1][k - 1]
        if weight:
            total += weight * sum(basis.left[p + t - 1], Fraction(0))
    return total


@dataclass(frozen=True)
class CancellationReport:
    """Kernel term against the r = 0..t_K-t spectral terms at one (n, k, d, t).

    explicit_kernel marks k = n - 1, where the kernel is added to the series instead of
    cancelling its p = 0 term.
    """
    n: int
    k: int
    d: int
    t: int
    kernel: Fraction
    spectral_terms: tuple[float, ...]
    residual: float
    scale: float
    tolerance: float
    exact_delta: Fraction | None = None
    renormalized_delta: float | None = None
    identity_error: float | None = None
    explicit_kernel: bool = False

    @property
    def cancels(self) -> bool:
        if self.explicit_kernel:
            return True
        return abs(self.residual) <= self.tolerance * self.scale

    @property
    def ok(self) -> bool:
        if not self.cancels:
            return False
        return self.identity_error is None or self.identity_error <= DEFAULT_IDENTITY_TOL

    def row(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "t": self.t,
            "kernel": float(self.kernel),
            "kernel_exact": str(self.kernel),
            "spectral_sum": math.fsum(self.spectral_terms),
            "residual": self.residual,
            "scale": self.scale,
            "identity_error": self.identity_error,
            "kernel_mode": "explicit" if self.explicit_kernel else "cancelled",
            "ok": self.ok,
        }


def cancellation_check(
    params: ModelParams,
    t: int,
    tol: float = DEFAULT_CANCELLATION_TOL,
    exact_delta: Fraction | None = None,
    evaluator: SeriesEvaluator | None = None,
) -> CancellationReport:
    """Compare I_k^ker(t) with minus the non-positive-p series terms, and the
    renormalized series plus boundary tail with the exact Delta I_k(t).

    A mismatch is returned in the report, never raised.
    """
    t_K = timescales(params).t_K
    if not 0 <= t <= t_K:
        raise ParameterError(f"cancellation is defined for 0 <= t <= t_K={t_K} (got {t})", t=t)
    evaluator = evaluator or SeriesEvaluator(params)
    kernel = kernel_power_contribution(params, t)
    terms = tuple(evaluator.terms(t, 0, t_K - t + 1))
    residual = float(kernel) + math.fsum(terms)
    scale = max([abs(float(kernel)), *(abs(x) for x in terms)])

    if exact_delta is None:
        trajectory = iterate_trajectory(params, t, ArithmeticMode.RATIONAL, components=[params.k])
        exact_delta = delta_purity(trajectory)[t]
    explicit = kernel_enters_explicitly(params)
    renormalized = evaluator.total(t, include_kernel_renormalization=True) + boundary_tail(params, t)
    if explicit:
        renormalized += float(kernel)
    identity_error = abs(renormalized - float(exact_delta)) / abs(float(exact_delta))

    report = CancellationReport(
        n=params.n, k=params.k, d=params.d, t=t,
        kernel=kernel, spectral_terms=terms, residual=residual, scale=scale, tolerance=tol,
        exact_delta=exact_delta, renormalized_delta=renormalized, identity_error=identity_error,
        explicit_kernel=explicit,
    )
    if not report.ok:
        logger.warning(
            f"Cancellation mismatch n={params.n} k={params.k} d={params.d} t={t}: "
            f"kernel={kernel} spectral={math.fsum(terms):.17g} identity_error={identity_error:.3g}"
        )
    return report
