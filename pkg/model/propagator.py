"""
Purity propagator A, its Toeplitz core T, and exact / float64 trajectory iteration.

Components follow the 1-based cut convention: component k is the purity of the
first k qudits, and components 1 and n are pinned to 1.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ParameterError, ResourceLimitError
from .params import ModelParams

logger = logging.getLogger("phantomlab.model")

DEFAULT_MAX_DENOMINATOR_BITS = 4_000_000


class ArithmeticMode(Enum):
    RATIONAL = "rational"
    FLOAT64 = "float64"


@dataclass(frozen=True, eq=False)
class Propagator:
    matrix: np.ndarray      # n x n, dtype object (Fractions) or float64
    mode: ArithmeticMode

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def T(self) -> np.ndarray:
        return self.matrix[1:-1, 1:-1]

    @property
    def a1(self) -> np.ndarray:
        return self.matrix[1:-1, 0]

    @property
    def a2(self) -> np.ndarray:
        return self.matrix[1:-1, -1]

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix.dot(vector)


@dataclass(frozen=True)
class PurityVector:
    entries: tuple
    mode: ArithmeticMode

    def __getitem__(self, k: int):
        """Component k in the 1-based convention."""
        if not 1 <= k <= len(self.entries):
            raise ParameterError(f"component {k} outside 1..{len(self.entries)}")
        return self.entries[k - 1]

    def __len__(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        if self.mode is ArithmeticMode.RATIONAL:
            return np.array(self.entries, dtype=object)
        return np.array(self.entries, dtype=np.float64)


def build_propagator(params: ModelParams, mode: ArithmeticMode = ArithmeticMode.FLOAT64) -> Propagator:
    n = params.n
    if mode is ArithmeticMode.RATIONAL:
        alpha, zero, one, dtype = params.alpha, Fraction(0), Fraction(1), object
    else:
        alpha, zero, one, dtype = float(params.alpha), 0.0, 1.0, np.float64

    powers = [alpha**p for p in range(n + 1)]
    A = np.full((n, n), zero, dtype=dtype)
    A[0, 0] = one
    A[n - 1, n - 1] = one
    for i in range(1, n - 1):
        A[i, 0] = powers[i + 1]
        # T block plus the a2 entry of the last interior row: alpha^(i-j+2) up to the superdiagonal
        for j in range(1, min(i + 1, n - 1) + 1):
            A[i, j] = powers[i - j + 2]
    return Propagator(matrix=A, mode=mode)


def saturation_value(params: ModelParams, k: int) -> Fraction:
    """Random-state purity (d^k + d^(n-k)) / (1 + d^n) of cut k."""
    n, d = params.n, params.d
    if k in (1, n):
        return Fraction(1)
    return Fraction(d**k + d ** (n - k), 1 + d**n)


def steady_state(params: ModelParams, mode: ArithmeticMode = ArithmeticMode.RATIONAL) -> PurityVector:
    values = [saturation_value(params, k) for k in range(1, params.n + 1)]
    if mode is ArithmeticMode.FLOAT64:
        values = [float(v) for v in values]
    return PurityVector(entries=tuple(values), mode=mode)


def fixed_point_residual(params: ModelParams, mode: ArithmeticMode) -> float:
    """max |A I_inf - I_inf|; exactly zero in rational mode."""
    prop = build_propagator(params, mode)
    inf = steady_state(params, mode).as_array()
    diff = prop.apply(inf) - inf
    return float(max(abs(x) for x in diff))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """I(0..t_max) restricted to `components`.

    Rational mode stores each step as integers v over a common scale s^e with
    s = d^2 + 1, which keeps the iteration free of gcd reductions.
    """
    params: ModelParams
    mode: ArithmeticMode
    components: tuple[int, ...]
    exponents: tuple[int, ...] = ()
    numerators: tuple[tuple[int, ...], ...] = ()
    values: np.ndarray | None = None

    @property
    def t_max(self) -> int:
        if self.mode is ArithmeticMode.RATIONAL:
            return len(self.exponents) - 1
        return self.values.shape[0] - 1

    def _column(self, k: int) -> int:
        try:
            return self.components.index(k)
        except ValueError:
            raise ParameterError(f"component {k} was not recorded", recorded=self.components) from None

    def scaled(self, k: int, t: int) -> tuple[int, int]:
        """(v, e) with I_k(t) = v / (d^2+1)^e; rational mode only."""
        if self.mode is not ArithmeticMode.RATIONAL:
            raise ParameterError("scaled numerators exist only in rational mode")
        return self.numerators[t][self._column(k)], self.exponents[t]

    def purity(self, k: int, t: int):
        col = self._column(k)
        if self.mode is ArithmeticMode.RATIONAL:
            return Fraction(self.numerators[t][col], self.params.scale ** self.exponents[t])
        return float(self.values[t, col])

    def series(self, k: int) -> list:
        return [self.purity(k, t) for t in range(self.t_max + 1)]

    def vector(self, t: int) -> PurityVector:
        if self.components != tuple(range(1, self.params.n + 1)):
            raise ParameterError("full vectors need every component recorded")
        entries = tuple(self.purity(k, t) for k in self.components)
        return PurityVector(entries=entries, mode=self.mode)


def _scaled_step(v: list[int], d: int, s_pows: list[int], d_pows: list[int]) -> list[int]:
    """One application of A to I = v / s^e, returning numerators over s^(e+n-1).

    Interior rows are evaluated with a running sum so a step costs O(n) big-int operations.
    """
    n = len(v)
    d2 = d * d
    new = [0] * n
    new[0] = v[0] * s_pows[n - 1]
    new[n - 1] = v[n - 1] * s_pows[n - 1]
    running = 0
    tail = d * s_pows[n - 2]
    for i in range(2, n):
        running = d * running + s_pows[i - 2] * v[i - 1]
        new[i - 1] = s_pows[n - 1 - i] * (d_pows[i] * v[0] + d2 * running) + tail * v[i]
    return new


def _check_components(params: ModelParams, components: Sequence[int] | None) -> tuple[int, ...]:
    if components is None:
        return tuple(range(1, params.n + 1))
    chosen = tuple(sorted(set(components)))
    for k in chosen:
        if not 1 <= k <= params.n:
            raise ParameterError(f"component {k} outside 1..{params.n}")
    return chosen


def iterate_trajectory(
    params: ModelParams,
    t_max: int,
    mode: ArithmeticMode = ArithmeticMode.FLOAT64,
    components: Sequence[int] | None = None,
    max_denominator_bits: int = DEFAULT_MAX_DENOMINATOR_BITS,
) -> Trajectory:
    """I(0) = (1,...,1) iterated t_max times; rational mode is the exact oracle."""
    if t_max < 0:
        raise ParameterError(f"t_max must be >= 0 (got {t_max})")
    kept = _check_components(params, components)
    cols = [k - 1 for k in kept]
    n, d, s = params.n, params.d, params.scale

    if mode is ArithmeticMode.FLOAT64:
        A = build_propagator(params, mode).matrix
        state = np.ones(n)
        values = np.empty((t_max + 1, len(kept)))
        values[0] = state[cols]
        for t in range(1, t_max + 1):
            state = A @ state
            values[t] = state[cols]
        return Trajectory(params=params, mode=mode, components=kept, values=values)

    s_pows = [s**p for p in range(n)]
    d_pows = [d**p for p in range(n)]
    bits_per_step = (n - 1) * math.log2(s)
    v = [1] * n
    e = 0
    exponents = [0]
    numerators = [tuple(v[c] for c in cols)]
    for t in range(1, t_max + 1):
        if (e + n - 1) * math.log2(s) > max_denominator_bits:
            raise ResourceLimitError(
                "rational denominator exceeds the configured bit limit",
                t=t, bits=int((e + n - 1) * math.log2(s)), limit=max_denominator_bits,
            )
        v = _scaled_step(v, d, s_pows, d_pows)
        e += n - 1
        exponents.append(e)
        numerators.append(tuple(v[c] for c in cols))
    logger.debug(
        f"Exact iteration n={n}, d={d}: {t_max} steps, final denominator ~{int(e * math.log2(s))} bits "
        f"({bits_per_step:.0f} bits/step)"
    )
    return Trajectory(
        params=params, mode=mode, components=kept,
        exponents=tuple(exponents), numerators=tuple(numerators),
    )


def delta_purity(trajectory: Trajectory, k: int | None = None) -> list:
    """Delta I_k(t) = I_k(t) - [I_inf]_k over the whole trajectory (default k from params)."""
    params = trajectory.params
    k = params.k if k is None else k
    target = saturation_value(params, k)
    if trajectory.mode is ArithmeticMode.FLOAT64:
        return [x - float(target) for x in trajectory.series(k)]
    s = params.scale
    out = []
    for t in range(trajectory.t_max + 1):
        v, e = trajectory.scaled(k, t)
        scale = s**e
        out.append(Fraction(v * target.denominator - target.numerator * scale, scale * target.denominator))
    return out


def _ratio(b, a) -> float:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        # integer true division is correctly rounded and skips the gcd of huge Fractions
        return (b.numerator * a.denominator) / (b.denominator * a.numerator)
    return float(b) / float(a)


def effective_rate(delta_sequence: Sequence) -> list[float | None]:
    """lambda_eff(t) = Delta I(t+1) / Delta I(t); None where Delta I(t) is not positive or underflowed."""
    rates: list[float | None] = []
    for t in range(len(delta_sequence) - 1):
        a, b = delta_sequence[t], delta_sequence[t + 1]
        if a <= 0 or b <= 0:
            logger.debug(f"effective rate undefined at t={t}: non-positive Delta I")
            rates.append(None)
            continue
        value = _ratio(b, a)
        rates.append(value if math.isfinite(value) and value > 0 else None)
    return rates


def relaxation_log_profile(params: ModelParams, t_max: int) -> np.ndarray:
    """ln Delta I_k(t) for k = 2..n-1, shape (t_max+1, n-2), float64.

    Iterates the deviation vector with T directly and renormalizes every step,
    so late-time rates stay resolvable long after I - I_inf underflows.
    """
    if t_max < 0:
        raise ParameterError(f"t_max must be >= 0 (got {t_max})")
    T = build_propagator(params, ArithmeticMode.FLOAT64).T
    x = np.array([float(1 - saturation_value(params, k)) for k in range(2, params.n)])
    log_scale = 0.0
    out = np.empty((t_max + 1, params.n - 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        out[0] = np.log(x)
        for t in range(1, t_max + 1):
            x = T @ x
            norm = np.max(np.abs(x))
            x = x / norm
            log_scale += math.log(norm)
            out[t] = np.log(x) + log_scale
    return out


def effective_rate_profile(params: ModelParams, t_max: int, k: int | None = None) -> np.ndarray:
    """lambda_eff(t), t = 0..t_max-1, from the renormalized deviation iteration."""
    k = params.k if k is None else k
    logs = relaxation_log_profile(params, t_max)[:, k - 2]
    return np.exp(np.diff(logs))


def second_renyi_entropy(trajectory: Trajectory) -> np.ndarray:
    """S_2 = -ln I for every recorded cut, shape (t_max+1, len(components))."""
    rows = []
    for t in range(trajectory.t_max + 1):
        if trajectory.mode is ArithmeticMode.RATIONAL:
            s = trajectory.params.scale
            row = []
            for k in trajectory.components:
                v, e = trajectory.scaled(k, t)
                row.append(e * math.log(s) - math.log(v))
            rows.append(row)
        else:
            rows.append(list(-np.log(trajectory.values[t])))
    return np.array(rows, dtype=np.float64)
