"""
Monte Carlo averages of cut purities over staircase Haar circuits.

Gate (realization, layer, bond) is drawn from its own counter-keyed stream, so any
single gate can be reproduced without replaying the circuit.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from model.errors import ParameterError, ResourceLimitError
from model.rng import SeededStreams, check_seed

from .haar import CircuitState, apply_staircase_layer, purities, purity_of_cut, sample_haar_gate

logger = logging.getLogger("phantomlab.oracle")

DEFAULT_STATE_LIMIT = 2**24
DEFAULT_MIN_REALIZATIONS = 100
_RANDOM_STATE_STREAM = 2**32


@dataclass(frozen=True, eq=False)
class MCResult:
    """mean[t, k-1] and stderr[t, k-1] for t = 0..t_max and cuts k = 1..n-1."""
    n: int
    d: int
    seed: int
    realizations: int
    mean: np.ndarray
    stderr: np.ndarray

    @property
    def t_max(self) -> int:
        return self.mean.shape[0] - 1

    def to_frame(self) -> pd.DataFrame:
        t, k = np.meshgrid(np.arange(self.t_max + 1), np.arange(1, self.n), indexing="ij")
        return pd.DataFrame({
            "k": k.ravel(),
            "t": t.ravel(),
            "mean": self.mean.ravel(),
            "stderr": self.stderr.ravel(),
            "realizations": self.realizations,
        }).sort_values(["k", "t"], kind="stable").reset_index(drop=True)


def _check_circuit(n: int, d: int, t_max: int, state_limit: int):
    if not isinstance(n, int) or n < 2:
        raise ParameterError(f"n must be an integer >= 2 (got {n})", n=n)
    if not isinstance(d, int) or d < 2:
        raise ParameterError(f"d must be an integer >= 2 (got {d})", d=d)
    if t_max < 0:
        raise ParameterError(f"t_max must be >= 0 (got {t_max})", t_max=t_max)
    if d**n > state_limit:
        raise ResourceLimitError(
            f"state of {d}^{n} amplitudes exceeds the limit of {state_limit}",
            amplitudes=d**n, limit=state_limit, estimated_bytes=16 * d**n,
        )


def single_realization(n: int, d: int, t_max: int, seed: int, realization: int = 0,
                       state_limit: int = DEFAULT_STATE_LIMIT) -> np.ndarray:
    """Purities of one circuit: row t holds I_1..I_{n-1} after t staircase layers."""
    _check_circuit(n, d, t_max, state_limit)
    streams = SeededStreams(seed)
    state = CircuitState.product(n, d)
    table = np.empty((t_max + 1, n - 1))
    table[0] = purities(state)
    for layer in range(t_max):
        gates = [sample_haar_gate(d, streams.stream(realization, layer, bond)) for bond in range(n - 1)]
        state = apply_staircase_layer(state, gates)
        table[layer + 1] = purities(state)
    return table


def mc_average(
    n: int,
    d: int,
    t_max: int,
    realizations: int,
    seed: int,
    threads: int = 1,
    state_limit: int = DEFAULT_STATE_LIMIT,
    min_realizations: int = DEFAULT_MIN_REALIZATIONS,
) -> MCResult:
    _check_circuit(n, d, t_max, state_limit)
    check_seed(seed)
    if realizations < min_realizations:
        raise ParameterError(
            f"at least {min_realizations} realizations are required (got {realizations})",
            realizations=realizations,
        )
    logger.info(f"Monte Carlo n={n} d={d} t_max={t_max}: {realizations} realizations, seed={seed}")

    def run(r: int) -> np.ndarray:
        return single_realization(n, d, t_max, seed, r, state_limit)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tables = list(pool.map(run, range(realizations)))
    else:
        tables = [run(r) for r in range(realizations)]

    samples = np.stack(tables)
    mean = np.mean(samples, axis=0)
    stderr = np.std(samples, axis=0, ddof=1) / math.sqrt(realizations)
    logger.info(f"Monte Carlo finished: {realizations} circuits, {t_max} layers")
    return MCResult(n=n, d=d, seed=seed, realizations=realizations, mean=mean, stderr=stderr)


@dataclass(frozen=True)
class RandomStateEstimate:
    mean: float
    stderr: float
    expected: float     # (d^k + d^(n-k)) / (1 + d^n)
    samples: int


def random_state_purity(n: int, d: int, k: int, samples: int, seed: int,
                        state_limit: int = DEFAULT_STATE_LIMIT) -> RandomStateEstimate:
    """Purity of cut k averaged over normalized complex Gaussian states."""
    _check_circuit(n, d, 0, state_limit)
    if samples < 2:
        raise ParameterError(f"samples must be >= 2 (got {samples})", samples=samples)
    streams = SeededStreams(seed)
    values = np.empty(samples)
    for s in range(samples):
        rng = streams.stream(_RANDOM_STATE_STREAM, s)
        psi = rng.standard_normal(d**n) + 1j * rng.standard_normal(d**n)
        values[s] = purity_of_cut(CircuitState(amplitudes=psi / np.linalg.norm(psi), n=n, d=d), k)
    return RandomStateEstimate(
        mean=float(np.mean(values)),
        stderr=float(np.std(values, ddof=1) / math.sqrt(samples)),
        expected=(d**k + d ** (n - k)) / (1 + d**n),
        samples=samples,
    )
