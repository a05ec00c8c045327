"""
Jacobi theta functions in the nome convention

    theta4(z, q) = 1 + 2 sum_j (-1)^j q^(j^2) cos(2jz)
    theta1(z, q) = 2 q^(1/4) sum_k (-1)^k q^(k(k+1)) sin((2k+1)z)

evaluated by truncated series: float64 up to q = 0.5, mpmath above, where the alternating
terms peak near exp(pi^2 / 4L), L = -ln q, and need that many extra digits.
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from model.errors import DomainError

logger = logging.getLogger("phantomlab.asymptotics")

SERIES_REL_TOL = 1e-18
MIN_TERMS = 5
FLOAT_NOME_LIMIT = 0.5
SMALL_NOME = 1e-4


@dataclass(frozen=True)
class ThetaEval:
    q: float
    z: float
    value: float
    dq: float
    dq2: float | None
    terms: int


def _check_nome(q: float):
    if not 0 <= q < 1:
        raise DomainError(f"theta nome must satisfy 0 <= q < 1 (got {q})", q=q)


def _digits(q: float) -> int:
    L = -math.log(q)
    return 30 + math.ceil(math.pi**2 / (4 * L * math.log(10)))


def _done(j: int, pairs, rel: float) -> bool:
    return j >= MIN_TERMS and all(abs(term) <= rel * abs(total) for term, total in pairs)


def _theta4_sums(q, rel):
    value, d1, d2 = 1 + 0 * q, 0 * q, 0 * q
    j = 1
    while True:
        sgn = -1 if j % 2 else 1
        jj = j * j
        tv = 2 * sgn * q**jj
        t1 = 2 * sgn * jj * q ** (jj - 1)
        t2 = 2 * sgn * jj * (jj - 1) * q ** (jj - 2) if j > 1 else 0 * q
        value, d1, d2 = value + tv, d1 + t1, d2 + t2
        if _done(j, ((tv, value), (t1, d1), (t2, d2)), rel):
            return value, d1, d2, j
        j += 1


def theta4_dq(q: float) -> ThetaEval:
    """(theta4, d theta4/dq, d^2 theta4/dq^2) at z = 0."""
    _check_nome(q)
    if q <= FLOAT_NOME_LIMIT:
        value, d1, d2, terms = _theta4_sums(float(q), SERIES_REL_TOL)
        return ThetaEval(q=q, z=0.0, value=value, dq=d1, dq2=d2, terms=terms)
    dps = _digits(q)
    with mpmath.workdps(dps):
        value, d1, d2, terms = _theta4_sums(mpmath.mpf(q), mpmath.mpf(10) ** (-dps + 5))
        return ThetaEval(q=q, z=0.0, value=float(value), dq=float(d1), dq2=float(d2), terms=terms)


def _theta4_z_sums(q, rel):
    value, dz2, dz4 = 1 + 0 * q, 0 * q, 0 * q
    j = 1
    while True:
        sgn = -1 if j % 2 else 1
        x = q ** (j * j)
        tv, t2, t4 = 2 * sgn * x, -8 * sgn * j**2 * x, 32 * sgn * j**4 * x
        value, dz2, dz4 = value + tv, dz2 + t2, dz4 + t4
        if _done(j, ((tv, value), (t2, dz2), (t4, dz4)), rel):
            return value, dz2, dz4
        j += 1


def theta4_dz(q: float) -> tuple[float, float, float]:
    """(theta4, d^2/dz^2, d^4/dz^4) at z = 0."""
    _check_nome(q)
    if q <= FLOAT_NOME_LIMIT:
        return _theta4_z_sums(float(q), SERIES_REL_TOL)
    dps = _digits(q)
    with mpmath.workdps(dps):
        return tuple(float(x) for x in _theta4_z_sums(mpmath.mpf(q), mpmath.mpf(10) ** (-dps + 5)))


def _theta1_sums(z, q, rel, sin):
    quarter = q**0.25 if not isinstance(q, mpmath.mpf) else mpmath.root(q, 4)
    value, dq, dz2 = 0 * q, 0 * q, 0 * q
    k = 0
    while True:
        sgn = -1 if k % 2 else 1
        e = k * (k + 1)
        s = sin((2 * k + 1) * z)
        x = q**e
        tv = sgn * x * s
        t1 = sgn * (e + 0.25) * q ** (e - 1) * s
        t2 = -sgn * (2 * k + 1) ** 2 * x * s
        value, dq, dz2 = value + tv, dq + t1, dz2 + t2
        if _done(k + 1, ((tv, value), (t1, dq), (t2, dz2)), rel):
            break
        k += 1
    # theta1 = 2 q^(1/4) S, theta1' = 2 q^(1/4) (S/(4q) + S') folded into t1 above
    return 2 * quarter * value, 2 * quarter * dq, 2 * quarter * dz2, k + 1


def theta1_dq(z: float, q: float) -> ThetaEval:
    """(theta1, d theta1/dq); dq2 is left empty. `value` at q = 0 is 0 and dq is infinite."""
    _check_nome(q)
    if not 0 < z < math.pi:
        raise DomainError(f"theta1 phase must satisfy 0 < z < pi (got {z})", z=z)
    if q == 0:
        return ThetaEval(q=0.0, z=z, value=0.0, dq=math.inf, dq2=None, terms=1)
    if q <= FLOAT_NOME_LIMIT:
        value, d1, _, terms = _theta1_sums(z, float(q), SERIES_REL_TOL, math.sin)
        return ThetaEval(q=q, z=z, value=value, dq=d1, dq2=None, terms=terms)
    dps = _digits(q)
    with mpmath.workdps(dps):
        value, d1, _, terms = _theta1_sums(mpmath.mpf(z), mpmath.mpf(q), mpmath.mpf(10) ** (-dps + 5), mpmath.sin)
        return ThetaEval(q=q, z=z, value=float(value), dq=float(d1), dq2=None, terms=terms)


def theta1_log_derivative(z: float, q: float) -> float:
    """1 + theta1_zz / theta1 = 1 - 4 q theta1' / theta1, from the direct series ratio."""
    _check_nome(q)
    if q == 0:
        return 0.0
    if q <= FLOAT_NOME_LIMIT:
        value, _, dz2, _ = _theta1_sums(z, float(q), SERIES_REL_TOL, math.sin)
        return 1 + dz2 / value
    dps = _digits(q)
    with mpmath.workdps(dps):
        value, _, dz2, _ = _theta1_sums(mpmath.mpf(z), mpmath.mpf(q), mpmath.mpf(10) ** (-dps + 5), mpmath.sin)
        return float(1 + dz2 / value)


def lattice_log_derivative(z: float, q: float) -> float:
    """1 + theta1_zz / theta1 as the single sum
    sum_j 16 q^(2j) cos(2zj) / (1 - q^(2j))^2 + 8 j q^(2j) / (1 - q^(2j))."""
    _check_nome(q)
    if q == 0:
        return 0.0
    log_q2 = 2 * math.log(q)
    terms = []
    partial = 0.0
    j = 1
    while True:
        x = math.exp(j * log_q2)
        one_minus = -math.expm1(j * log_q2)
        terms.append(16 * x * math.cos(2 * z * j) / one_minus**2 + 8 * j * x / one_minus)
        partial += terms[-1]
        if j >= MIN_TERMS and x * (16 / one_minus**2 + 8 * j / one_minus) <= SERIES_REL_TOL * abs(partial):
            break
        j += 1
    return math.fsum(terms)


def theta4_rate_shape(L: float) -> float:
    """-q theta4''(q) / theta4'(q) at q = e^-L, written as 1 + F''/F' with F(L) = theta4(0, e^-L).

    L >= 1: direct ratio of the series divided through by q.
    L < 1: Poisson-resummed form F ~ L^(-1/2) sum_m exp(-pi^2 (m + 1/2)^2 / L), which converges
    fast exactly where the direct series does not.
    """
    if L <= 0:
        raise DomainError(f"theta shape needs L = -ln q > 0 (got {L})", L=L)
    if L >= 1:
        num, den = 0.0, -1.0
        j = 2
        while True:
            y = math.exp(-(j * j - 1) * L)
            sgn = 1 if j % 2 == 0 else -1
            num += sgn * j * j * (1 - j * j) * y
            den += sgn * j * j * y
            if j >= MIN_TERMS and abs(j**4 * y) <= SERIES_REL_TOL * abs(num):
                break
            j += 1
        return num / den

    a0 = math.pi**2 / 4
    num, den = 0.0, 0.0
    m = 0
    while True:
        a = math.pi**2 * (m + 0.5) ** 2
        w = math.exp(-(a - a0) / L)
        u = -1 / (2 * L) + a / L**2
        v = u * u + 1 / (2 * L**2) - 2 * a / L**3
        num += w * v
        den += w * u
        if m >= MIN_TERMS and w <= SERIES_REL_TOL:
            break
        m += 1
    return 1 + num / den


def small_nome_rate_shape(L: float) -> float:
    """Leading term 12 q^3 of theta4_rate_shape, evaluated in logs."""
    return math.exp(math.log(12) - 3 * L)


def theta4_grid(q_values) -> np.ndarray:
    """theta4(0, q) on arbitrary complex nomes |q| < 1, as plain data."""
    q_arr = np.asarray(q_values, dtype=complex)
    out = np.empty(q_arr.shape, dtype=complex)
    for idx, q in np.ndenumerate(q_arr):
        if abs(q) >= 1:
            raise DomainError(f"theta nome must satisfy |q| < 1 (got {q})", q=q)
        out[idx] = complex(mpmath.jtheta(4, 0, mpmath.mpc(q.real, q.imag)))
    return out
