"""
Magic sums over the angles phi_j = pi j / n, j = 1..n/2-1:

    h_r(p) = sum_j (-1)^j cos^p(phi_j) cos(r phi_j)
    f_k(p) = -sum_j (-1)^j cos^p(phi_j) sin(phi_j) sin(k phi_j) = (h_{k+1}(p) - h_{k-1}(p)) / 2

For p >= 0 and p + r even, h_r(p) is a rational with denominator 2^(p+1). The table
marches p upward with h_r(p+1) = (h_{r+1}(p) + h_{r-1}(p)) / 2 on integer numerators,
starting from the closed form of h_r(0). Float evaluation of the plain sum loses
about n bits to cancellation, so every consumer that needs f_k(p) for p >= 0 reads it
from the table.
"""
import logging
import math
from fractions import Fraction

import mpmath
import numpy as np

from model.errors import ParameterError

logger = logging.getLogger("phantomlab.spectral")

ZERO_THRESHOLD = 1e-13
_IDENTIFY_DIGITS = 60
_IDENTIFY_DENOMINATOR = 10**12


def _check_n(n: int):
    if not isinstance(n, int) or n < 4 or n % 2:
        raise ParameterError(f"n must be an even integer >= 4 (got {n})", n=n)


def _check_k(n: int, k: int):
    if not 2 <= k <= n - 1:
        raise ParameterError(f"k must satisfy 2 <= k <= n-1 (got k={k}, n={n})", n=n, k=k)


def _initial_numerators(n: int) -> list[int]:
    """2 h_r(0) for r = 0..2n-1 (zero on the odd-r class, which is never read at p = 0)."""
    row = []
    for r in range(2 * n):
        if r % 2:
            row.append(0)
            continue
        m = (n + r) // 2
        hits = n if m % n == 0 else 0
        row.append((hits - 1) - (-1) ** m)
    return row


class MagicSumTable:
    """Exact f_k(p), p >= 0, for one system size n.

    Rows of integer numerators are kept for p < keep_rows; beyond that only
    (sign, ln|f|) per cut k survives, which is all the series needs.
    """

    def __init__(self, n: int, keep_rows: int | None = None):
        _check_n(n)
        self.n = n
        self.keep_rows = 4 * n if keep_rows is None else keep_rows
        self._current = _initial_numerators(n)
        self._p = 0
        self._rows: list[list[int]] = []
        self._signs: list[np.ndarray] = []
        self._logs: list[np.ndarray] = []
        self._record()

    @property
    def p_max(self) -> int:
        return self._p

    def _record(self):
        n, p, row = self.n, self._p, self._current
        if p < self.keep_rows:
            self._rows.append(row)
        signs = np.zeros(n + 1, dtype=np.int8)
        logs = np.full(n + 1, -np.inf)
        shift = (p + 2) * math.log(2)
        for k in range(2, n):
            if (p + k) % 2 == 0:
                continue
            num = row[k + 1] - row[k - 1]
            if num:
                signs[k] = 1 if num > 0 else -1
                logs[k] = math.log(abs(num)) - shift
        self._signs.append(signs)
        self._logs.append(logs)

    def extend(self, p_max: int):
        if p_max <= self._p:
            return
        period = 2 * self.n
        while self._p < p_max:
            row = self._current
            self._current = [row[r - 1] + row[(r + 1) % period] for r in range(period)]
            self._p += 1
            self._record()
        logger.debug(f"Magic-sum table n={self.n} extended to p={p_max}")

    def _row(self, p: int) -> list[int]:
        if p < len(self._rows):
            return self._rows[p]
        # beyond the kept rows: replay the march without storing
        period = 2 * self.n
        row = _initial_numerators(self.n)
        for _ in range(p):
            row = [row[r - 1] + row[(r + 1) % period] for r in range(period)]
        return row

    def h_exact(self, r: int, p: int) -> Fraction:
        if p < 0 or (p + r) % 2:
            raise ParameterError("exact h_r(p) needs p >= 0 and p + r even", r=r, p=p)
        return Fraction(self._row(p)[r % (2 * self.n)], 2 ** (p + 1))

    def exact(self, k: int, p: int) -> Fraction:
        _check_k(self.n, k)
        if p < 0 or (p + k) % 2 == 0:
            raise ParameterError("exact f_k(p) needs p >= 0 and p + k odd", k=k, p=p)
        row = self._row(p)
        return Fraction(row[k + 1] - row[k - 1], 2 ** (p + 2))

    def sign_log(self, k: int, p: int) -> tuple[int, float]:
        """(sign, ln|f_k(p)|); sign 0 marks an exact zero."""
        _check_k(self.n, k)
        if p < 0 or (p + k) % 2 == 0:
            raise ParameterError("tabulated f_k(p) needs p >= 0 and p + k odd", k=k, p=p)
        self.extend(p)
        return int(self._signs[p][k]), float(self._logs[p][k])

    def value(self, k: int, p: int) -> float:
        sign, log_mag = self.sign_log(k, p)
        return sign * math.exp(log_mag) if sign else 0.0


def _mp_terms(n: int, p: int, weight):
    terms = []
    for j in range(1, n // 2):
        phi = mpmath.pi * j / n
        terms.append((-1) ** j * mpmath.cos(phi) ** p * weight(phi))
    return terms


def _working_digits(n: int, p: int) -> int:
    # cos(phi_j) reaches sin(pi/n) ~ pi/n, so negative powers need |p| log10(n) more digits
    return 30 + (int(abs(p) * math.log10(n)) + 1 if p < 0 else 0)


def magic_sum_mp(n: int, k: int, p: int, dps: int | None = None) -> mpmath.mpf:
    """f_k(p) in mpmath at `dps` digits; valid for every integer p."""
    _check_n(n)
    _check_k(n, k)
    with mpmath.workdps(dps or _working_digits(n, p)):
        terms = _mp_terms(n, p, lambda phi: mpmath.sin(phi) * mpmath.sin(k * phi))
        return -mpmath.fsum(terms)


def magic_sum_f(n: int, k: int, p: int) -> float:
    """f_k(p) as a float.

    p >= 0 uses math.fsum over float terms, so exact zeros land below 1e-13 of the
    largest term; negative p goes through mpmath.
    """
    _check_n(n)
    _check_k(n, k)
    if p < 0:
        return float(magic_sum_mp(n, k, p))
    terms = []
    for j in range(1, n // 2):
        phi = math.pi * j / n
        terms.append((-1) ** j * math.cos(phi) ** p * math.sin(phi) * math.sin(k * phi))
    return -math.fsum(terms)


def magic_sum_scale(n: int, k: int, p: int) -> float:
    """Largest |summand| of f_k(p): the scale exact zeros are judged against."""
    return max(
        abs(math.cos(math.pi * j / n) ** p * math.sin(math.pi * j / n) * math.sin(k * math.pi * j / n))
        for j in range(1, n // 2)
    )


def magic_sum_h(n: int, r: int, p: int) -> float:
    """h_r(p) as a float (exact table value when p >= 0 and p + r even)."""
    _check_n(n)
    if p >= 0 and (p + r) % 2 == 0:
        return float(MagicSumTable(n, keep_rows=p + 1).h_exact(r, p))
    with mpmath.workdps(_working_digits(n, p)):
        return float(mpmath.fsum(_mp_terms(n, p, lambda phi: mpmath.cos(r * phi))))


def magic_sum_exact(n: int, k: int, p: int) -> Fraction:
    """f_k(p) as an exact rational.

    p >= 0 with p + k odd comes straight from the integer recurrence. Otherwise the
    sum is evaluated at 60+ digits and matched to the nearest rational with a
    denominator below 1e12; the match must hold to 1e-40 or ParameterError is raised.
    """
    _check_n(n)
    _check_k(n, k)
    if p >= 0 and (p + k) % 2:
        return MagicSumTable(n, keep_rows=p + 1).exact(k, p)
    dps = max(_IDENTIFY_DIGITS, _working_digits(n, p) + 30)
    with mpmath.workdps(dps):
        value = magic_sum_mp(n, k, p, dps=dps)
        scale = 10 ** (dps - 10)
        candidate = Fraction(int(mpmath.nint(value * scale)), scale).limit_denominator(_IDENTIFY_DENOMINATOR)
        residual = abs(value - mpmath.mpf(candidate.numerator) / candidate.denominator)
        bound = mpmath.mpf(10) ** -40 * max(1, abs(value))
        if residual > bound:
            raise ParameterError(
                "f_k(p) has no small-denominator rational value at this precision",
                n=n, k=k, p=p, residual=mpmath.nstr(residual, 5),
            )
    return candidate


def is_magic_zero(n: int, k: int, p: int) -> bool:
    """True when f_k(p) vanishes to 1e-13 of its largest summand."""
    return abs(magic_sum_f(n, k, p)) < ZERO_THRESHOLD * magic_sum_scale(n, k, p)
