"""
Closed-form eigensystem of the Toeplitz core T and of the full propagator A,
steady states, and the expansion coefficients c_j of Delta I_k(t) = sum_j c_j lambda_j^t.

Eigenvectors carry factors (2 alpha cos phi_j)^k, so everything here is assembled in
mpmath at a working precision that grows like n log10(n) digits; numpy object arrays
hold the mpf entries.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import mpmath
import numpy as np

from model.errors import ParameterError
from model.params import ModelParams
from model.propagator import ArithmeticMode, build_propagator, steady_state

logger = logging.getLogger("phantomlab.spectral")

ZERO_THRESHOLD = 1e-13
_FLOAT_LOG_LIMIT = 700.0


def default_dps(n: int) -> int:
    """Digits that absorb the (cot(pi/n))^n spread between eigenvector entries."""
    return 30 + int(n * math.log10(n)) + 1


def to_mp(value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def mp_alpha(params: ModelParams) -> mpmath.mpf:
    return to_mp(params.alpha)


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Mode j of T lifted to A. Vector entries are mpf in numpy object arrays."""
    j: int
    phi: mpmath.mpf
    lambda_j: mpmath.mpf
    R_tilde: np.ndarray     # length n-2, right eigenvector of T
    L_tilde: np.ndarray     # length n-2, left eigenvector of T
    N_j: mpmath.mpf         # <L_tilde|R_tilde>
    R_A: np.ndarray         # length n, (0, R_tilde / N_j, 0)
    L_A: np.ndarray         # length n
    dps: int

    @property
    def eigenvalue(self) -> float:
        return float(self.lambda_j)


def _check_mode(params: ModelParams, j: int):
    if not 1 <= j <= params.half:
        raise ParameterError(f"mode index j must satisfy 1 <= j <= n/2-1 (got j={j}, n={params.n})", j=j)


def eigen_pair(params: ModelParams, j: int, dps: int | None = None) -> EigenPair:
    _check_mode(params, j)
    n = params.n
    dps = dps or default_dps(n)
    prop = build_propagator(params, ArithmeticMode.RATIONAL)
    with mpmath.workdps(dps):
        alpha = mp_alpha(params)
        phi = mpmath.pi * j / n
        mu = 2 * alpha * mpmath.cos(phi)
        sin_phi = mpmath.sin(phi)
        # 1-based component i of T runs over 1..n-2
        R = np.array([mu ** (i - 2) * mpmath.sin((i + 1) * phi) / sin_phi for i in range(1, n - 1)], dtype=object)
        L = np.array([mu ** (n - 3 - i) * mpmath.sin((n - i) * phi) / sin_phi for i in range(1, n - 1)], dtype=object)
        N = (-1) ** (j + 1) * mu ** (n - 5) * n * mpmath.cos(phi) / (2 * sin_phi**2)
        lam = mu**2

        a1 = [to_mp(x) for x in prop.a1]
        a2 = [to_mp(x) for x in prop.a2]
        left_first = mpmath.fdot(L, a1) / (lam - 1)
        left_last = mpmath.fdot(L, a2) / (lam - 1)
        zero = mpmath.mpf(0)
        R_A = np.array([zero, *(R / N), zero], dtype=object)
        L_A = np.array([left_first, *L, left_last], dtype=object)
    return EigenPair(j=j, phi=phi, lambda_j=lam, R_tilde=R, L_tilde=L, N_j=N, R_A=R_A, L_A=L_A, dps=dps)


def eigen_pairs(params: ModelParams, dps: int | None = None) -> list[EigenPair]:
    return [eigen_pair(params, j, dps) for j in range(1, params.half + 1)]


def eigenvalues(params: ModelParams) -> np.ndarray:
    """lambda_j = (2 alpha cos(pi j / n))^2 for j = 1..n/2-1, float64."""
    j = np.arange(1, params.half + 1)
    return (2 * float(params.alpha) * np.cos(np.pi * j / params.n)) ** 2


def steady_state_vectors(params: ModelParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(R0, L0, L0') for lambda = 1, exact Fractions.

    R0 = (1, I_inf, 1), L0 = (1/2, 0, ..., 0, 1/2), L0' = (1/2, 0, ..., 0, -1/2).
    """
    n = params.n
    R0 = steady_state(params, ArithmeticMode.RATIONAL).as_array()
    half = Fraction(1, 2)
    L0 = np.array([Fraction(0)] * n, dtype=object)
    L0p = np.array([Fraction(0)] * n, dtype=object)
    L0[0], L0[-1] = half, half
    L0p[0], L0p[-1] = half, -half
    return R0, L0, L0p


class CoefficientMethod(Enum):
    EXACT = "exact"                 # inner products with the A eigenvectors
    CLOSED_FORM = "closed-form"     # drops the lambda_j^(n/2-1) boundary terms


@dataclass(frozen=True)
class CoefficientSet:
    """c_j, j = 1..n/2-1, as (sign, ln|c_j|); `values` is None where float64 overflows."""
    params: ModelParams
    method: CoefficientMethod
    signs: tuple[int, ...]
    log_magnitudes: tuple[float, ...]
    values: tuple[float | None, ...]

    def sign(self, j: int) -> int:
        return self.signs[j - 1]

    def log_magnitude(self, j: int) -> float:
        return self.log_magnitudes[j - 1]

    def is_zero(self, j: int) -> bool:
        return self.signs[j - 1] == 0

    def nonzero_modes(self) -> list[int]:
        return [j for j, s in enumerate(self.signs, start=1) if s]

    def rows(self) -> list[dict]:
        lams = eigenvalues(self.params)
        return [
            {
                "j": j,
                "lambda_j": float(lams[j - 1]),
                "sign": self.signs[j - 1],
                "log_abs_c": self.log_magnitudes[j - 1],
            }
            for j in range(1, len(self.signs) + 1)
        ]


def projection_prefactor(params: ModelParams, j: int) -> mpmath.mpf:
    """[R_tilde_j]_{k-1} / N_j in closed form, at the caller's working precision."""
    n, k = params.n, params.k
    phi = mpmath.pi * j / n
    mu = 2 * mp_alpha(params) * mpmath.cos(phi)
    return (-1) ** (j + 1) * mpmath.mpf(2) / n * mu ** (k - n + 2) * mpmath.sin(phi) * mpmath.sin(k * phi) / mpmath.cos(phi)


def _sign_log(value: mpmath.mpf, zero: bool) -> tuple[int, float, float | None]:
    if zero or value == 0:
        return 0, -math.inf, 0.0
    log_mag = float(mpmath.log(abs(value)))
    sign = 1 if value > 0 else -1
    as_float = float(value) if abs(log_mag) < _FLOAT_LOG_LIMIT else None
    return sign, log_mag, as_float


def coefficients(
    params: ModelParams,
    method: CoefficientMethod = CoefficientMethod.EXACT,
    dps: int | None = None,
) -> CoefficientSet:
    """Expansion coefficients of Delta I_k(t) over the nonzero modes.

    EXACT takes c_j = [R_A]_k <L_A|I(0)> with I(0) = (1, ..., 1). CLOSED_FORM uses
    c_j = ([R_tilde]_{k-1} / N_j) (1/(lambda_ph - lambda_j) - 1/(1 - lambda_j)), which
    differs from EXACT by a relative lambda_j^(n/2).
    """
    if isinstance(method, str):
        method = CoefficientMethod(method)
    n, k = params.n, params.k
    dps = dps or default_dps(n)
    signs, logs, values = [], [], []
    overflowed = False
    with mpmath.workdps(dps):
        lam_ph = to_mp(params.lambda_ph)
        for j in range(1, params.half + 1):
            if method is CoefficientMethod.EXACT:
                pair = eigen_pair(params, j, dps)
                overlap = mpmath.fsum(pair.L_A)
                c = pair.R_A[k - 1] * overlap
                # envelope of component k without its sin(k phi) factor, times the overlap's summand scale
                mu = 2 * mp_alpha(params) * mpmath.cos(pair.phi)
                envelope = abs(mu) ** (k - 3) / (mpmath.sin(pair.phi) * abs(pair.N_j))
                scale = envelope * mpmath.fsum(abs(x) for x in pair.L_A)
                zero = abs(c) < ZERO_THRESHOLD * scale
            else:
                lam = (2 * mp_alpha(params) * mpmath.cos(mpmath.pi * j / n)) ** 2
                c = projection_prefactor(params, j) * (1 / (lam_ph - lam) - 1 / (1 - lam))
                zero = abs(mpmath.sin(k * mpmath.pi * j / n)) < ZERO_THRESHOLD
            sign, log_mag, as_float = _sign_log(c, zero)
            overflowed = overflowed or as_float is None
            signs.append(sign)
            logs.append(log_mag)
            values.append(as_float)
    if overflowed:
        logger.warning(f"Coefficients for n={n}, k={k} exceed float64; kept as (sign, log|c|)")
    return CoefficientSet(
        params=params, method=method, signs=tuple(signs), log_magnitudes=tuple(logs), values=tuple(values)
    )


def biorthogonality_matrix(params: ModelParams, dps: int | None = None) -> np.ndarray:
    """<L_A(j)|R_A(j')> for j, j' = 1..n/2-1; the identity up to rounding."""
    pairs = eigen_pairs(params, dps)
    size = len(pairs)
    out = np.empty((size, size))
    with mpmath.workdps(pairs[0].dps):
        for a, left in enumerate(pairs):
            for b, right in enumerate(pairs):
                out[a, b] = float(mpmath.fdot(left.L_A, right.R_A))
    return out


def spectral_projector_sum(params: ModelParams, dps: int | None = None) -> np.ndarray:
    """A_lambda = sum_j lambda_j R_A(j) L_A(j)^T as an mpf object array."""
    n = params.n
    pairs = eigen_pairs(params, dps)
    with mpmath.workdps(pairs[0].dps):
        total = np.array([[mpmath.mpf(0)] * n for _ in range(n)], dtype=object)
        for pair in pairs:
            total = total + np.outer(pair.R_A, pair.L_A) * pair.lambda_j
    return total


def completeness_residual(params: ModelParams, dps: int | None = None) -> float:
    """max |A - (R0 L0^T + R0' L0'^T + A_lambda + A_ker)|, entrywise."""
    from kernel.basis import kernel_matrix, steady_state_partner

    n = params.n
    dps = dps or default_dps(n)
    A = build_propagator(params, ArithmeticMode.RATIONAL).matrix
    R0, L0, L0p = steady_state_vectors(params)
    R0p = steady_state_partner(params)
    A_ker = kernel_matrix(params)
    exact_part = np.outer(R0, L0) + np.outer(R0p, L0p) + A_ker
    with mpmath.workdps(dps):
        A_lambda = spectral_projector_sum(params, dps)
        worst = mpmath.mpf(0)
        for a in range(n):
            for b in range(n):
                diff = to_mp(A[a, b]) - to_mp(exact_part[a, b]) - A_lambda[a, b]
                worst = max(worst, abs(diff))
    logger.debug(f"Completeness residual n={n}: {mpmath.nstr(worst, 5)}")
    return float(worst)
