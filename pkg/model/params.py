"""
Model parameters, characteristic decay rates and timescales of the staircase purity map.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError

logger = logging.getLogger("phantomlab.model")


@dataclass(frozen=True)
class ModelParams:
    """System size n (even), bipartition k (1-based cut), local dimension d."""
    n: int
    k: int
    d: int
    alpha: Fraction  # d / (d^2 + 1), exact

    @property
    def half(self) -> int:
        """Number of nonzero eigenvalues of T, also the kernel dimension: n/2 - 1."""
        return self.n // 2 - 1

    @property
    def lambda_ph(self) -> Fraction:
        return self.alpha / (1 - self.alpha)

    @property
    def scale(self) -> int:
        """d^2 + 1, the common denominator of every power of alpha."""
        return self.d * self.d + 1

    def with_k(self, k: int) -> "ModelParams":
        return make_params(self.n, k, self.d)


@dataclass(frozen=True)
class Timescales:
    t_K: int        # last step at which the Jordan kernel contributes
    t_c: int        # end of the phantom plateau
    t_inf: float    # saturation time estimate from lambda_ph^t = I_inf


def validate_params(n: int, k: int, d: int) -> list[str]:
    """Return one message per violated constraint (empty when valid)."""
    errors = []
    if not isinstance(n, int) or n < 4:
        errors.append(f"n must be an even integer >= 4 (got {n})")
    elif n % 2:
        errors.append(f"n must be even (got {n})")
    if not isinstance(d, int) or d < 2:
        errors.append(f"d must be an integer >= 2 (got {d})")
    if not isinstance(k, int) or isinstance(n, int) and not 2 <= k <= n - 1:
        errors.append(f"k must satisfy 2 <= k <= n-1 (got k={k}, n={n})")
    return errors


def make_params(n: int, k: int, d: int) -> ModelParams:
    errors = validate_params(n, k, d)
    if errors:
        raise ParameterError("; ".join(errors), n=n, k=k, d=d)
    return ModelParams(n=n, k=k, d=d, alpha=Fraction(d, d * d + 1))


def characteristic_rates(params: ModelParams) -> tuple[Fraction, float]:
    """(lambda_ph, lambda_1): the phantom rate and the finite-n leading eigenvalue (2 alpha cos(pi/n))^2."""
    lambda_1 = (2 * float(params.alpha) * math.cos(math.pi / params.n)) ** 2
    return params.lambda_ph, lambda_1


def timescales(params: ModelParams) -> Timescales:
    n, k = params.n, params.k
    t_c = n - k - 1
    t_inf = min(k, n - k) * math.log(params.d) / (-math.log(float(params.lambda_ph)))
    return Timescales(t_K=t_c // 2, t_c=t_c, t_inf=t_inf)


def timescale_table(n: int, d: int) -> list[tuple[int, Timescales]]:
    """Timescales for every cut k = 2..n-1."""
    table = []
    for k in range(2, n):
        table.append((k, timescales(make_params(n, k, d))))
    logger.debug(f"Timescale table built for n={n}, d={d} ({len(table)} cuts)")
    return table
