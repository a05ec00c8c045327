"""
Concrete experiments, one per CLI subcommand.

Each experiment is a plain dataclass of inputs; run() calls into the numerical
packages and returns tables plus the annotations the manifest records.
"""
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from asymptotics import (
    asymptote_half,
    asymptote_k2,
    rate_transition_half,
    rate_transition_k2,
    regime,
    theta4_grid,
)
from kernel import cancellation_check
from model.errors import ParameterError
from model.params import characteristic_rates, make_params, timescale_table, timescales
from model.propagator import (
    DEFAULT_MAX_DENOMINATOR_BITS,
    ArithmeticMode,
    delta_purity,
    effective_rate,
    iterate_trajectory,
    relaxation_log_profile,
    second_renyi_entropy,
)
from oracle import mc_average
from pseudospectrum import PerturbationConfig, collision_epsilon, kernel_cloud_radius, sweep
from spectral import MagicSumTable, SeriesEvaluator, coefficients, first_term_rate, magic_sum_f
from spectral.eigen import CoefficientMethod
from spectral.magic import is_magic_zero

from .base import Experiment, ExperimentResult, ExperimentType

logger = logging.getLogger("phantomlab.lab")


def _timescale_annotations(n: int, ks, d: int) -> dict:
    out = {}
    for k in ks:
        ts = timescales(make_params(n, k, d))
        out[int(k)] = {"t_K": ts.t_K, "t_c": ts.t_c, "t_inf": ts.t_inf}
    return out


def _rate_annotations(n: int, d: int) -> dict:
    lambda_ph, lambda_1 = characteristic_rates(make_params(n, 2, d))
    return {"lambda_ph": str(lambda_ph), "lambda_1": lambda_1}


@dataclass
class TrajectoryExperiment(Experiment):
    """I_k(t) and Delta I_k(t) by exact (or float64) iteration."""
    n: int
    ks: tuple[int, ...]
    d: int
    t_max: int
    mode: str = ArithmeticMode.RATIONAL.value
    max_denominator_bits: int = DEFAULT_MAX_DENOMINATOR_BITS

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.TRAJECTORY

    def parameters(self) -> dict:
        return {**asdict(self), "ks": list(self.ks)}

    def run(self) -> ExperimentResult:
        params = make_params(self.n, self.ks[0], self.d)
        trajectory = iterate_trajectory(
            params, self.t_max, ArithmeticMode(self.mode), components=self.ks,
            max_denominator_bits=self.max_denominator_bits,
        )
        rows = []
        for k in trajectory.components:
            deltas = delta_purity(trajectory, k)
            rates = effective_rate(deltas) + [None]
            for t in range(self.t_max + 1):
                rows.append({
                    "k": k,
                    "t": t,
                    "purity": float(trajectory.purity(k, t)),
                    "delta": float(deltas[t]),
                    "lambda_eff": rates[t],
                })
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"trajectory": pd.DataFrame(rows)},
            annotations={
                "timescales": _timescale_annotations(self.n, self.ks, self.d),
                **_rate_annotations(self.n, self.d),
            },
            summary=[("cuts", ", ".join(map(str, self.ks))), ("steps", str(self.t_max)), ("mode", self.mode)],
        )


@dataclass
class RatesExperiment(Experiment):
    """lambda_eff(t) for several cuts, with the leading-series-term estimate alongside."""
    n: int
    ks: tuple[int, ...]
    d: int
    t_max: int

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.RATES

    def parameters(self) -> dict:
        return {**asdict(self), "ks": list(self.ks)}

    def run(self) -> ExperimentResult:
        logs = relaxation_log_profile(make_params(self.n, self.ks[0], self.d), self.t_max)
        table = MagicSumTable(self.n)
        rows = []
        for k in self.ks:
            params = make_params(self.n, k, self.d)
            with np.errstate(over="ignore", invalid="ignore"):
                rates = np.exp(np.diff(logs[:, k - 2]))
            for t, rate in enumerate(rates):
                try:
                    estimate = first_term_rate(params, t, table)
                except ParameterError:
                    estimate = None
                rows.append({
                    "k": k,
                    "t": t,
                    "lambda_eff": float(rate) if math.isfinite(rate) else None,
                    "first_term": estimate,
                    "regime": regime(params, t).value,
                })
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"rates": pd.DataFrame(rows)},
            annotations={
                "timescales": _timescale_annotations(self.n, self.ks, self.d),
                **_rate_annotations(self.n, self.d),
            },
            summary=[("cuts", ", ".join(map(str, self.ks))), ("steps", str(self.t_max))],
        )


@dataclass
class CoefficientsExperiment(Experiment):
    """c_j as (sign, ln|c_j|) against lambda_j."""
    n: int
    k: int
    d: int
    method: str = CoefficientMethod.EXACT.value

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.COEFFICIENTS

    def parameters(self) -> dict:
        return asdict(self)

    def run(self) -> ExperimentResult:
        cset = coefficients(make_params(self.n, self.k, self.d), CoefficientMethod(self.method))
        zeros = [j for j in range(1, len(cset.signs) + 1) if cset.is_zero(j)]
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"coefficients": pd.DataFrame(cset.rows())},
            annotations={"zero_modes": zeros},
            summary=[
                ("modes", str(len(cset.signs))),
                ("zero modes", ", ".join(map(str, zeros)) or "none"),
                ("max ln|c_j|", f"{max(cset.log_magnitudes):.4g}"),
            ],
        )


@dataclass
class MagicSumsExperiment(Experiment):
    """f_k(p) on a (k, p) grid; only p + k odd, where the sum can be nonzero."""
    n: int
    ks: tuple[int, ...]
    p_min: int
    p_max: int

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.MAGIC_SUMS

    def parameters(self) -> dict:
        return {**asdict(self), "ks": list(self.ks)}

    def run(self) -> ExperimentResult:
        if self.p_max < self.p_min:
            raise ParameterError("p_max must be >= p_min", p_min=self.p_min, p_max=self.p_max)
        table = MagicSumTable(self.n)
        rows = []
        for k in self.ks:
            for p in range(self.p_min, self.p_max + 1):
                if (p + k) % 2 == 0:
                    continue
                if p >= 0:
                    exact = table.exact(k, p)
                    rows.append({"k": k, "p": p, "f": float(exact), "exact": str(exact), "zero": exact == 0})
                else:
                    rows.append({
                        "k": k, "p": p, "f": magic_sum_f(self.n, k, p), "exact": None,
                        "zero": is_magic_zero(self.n, k, p),
                    })
        frame = pd.DataFrame(rows)
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"magic_sums": frame},
            summary=[("cells", str(len(frame))), ("exact zeros", str(int(frame["zero"].sum())))],
        )


@dataclass
class KernelCheckExperiment(Experiment):
    """Kernel contribution against the non-positive-p series terms for every t <= t_K."""
    n: int
    d: int
    ks: tuple[int, ...]
    tol: float = 1e-10

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.KERNEL_CHECK

    def parameters(self) -> dict:
        return {**asdict(self), "ks": list(self.ks)}

    def run(self) -> ExperimentResult:
        table = MagicSumTable(self.n)
        rows = []
        for k in self.ks:
            params = make_params(self.n, k, self.d)
            t_K = timescales(params).t_K
            trajectory = iterate_trajectory(params, t_K, ArithmeticMode.RATIONAL, components=[k])
            deltas = delta_purity(trajectory, k)
            evaluator = SeriesEvaluator(params, table)
            for t in range(t_K + 1):
                report = cancellation_check(params, t, self.tol, exact_delta=deltas[t], evaluator=evaluator)
                rows.append(report.row())
        frame = pd.DataFrame(rows)
        failures = int((~frame["ok"]).sum())
        explicit = int((frame["kernel_mode"] == "explicit").sum())
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"kernel_check": frame},
            annotations={"failures": failures, "explicit_kernel_rows": explicit, "tolerance": self.tol},
            summary=[("checks", str(len(frame))), ("explicit kernel", str(explicit)), ("failures", str(failures))],
            ok=failures == 0,
        )


@dataclass
class ThetaExperiment(Experiment):
    """Theta-function transition curve for k = 2 or k = n/2, its asymptotes, and the exact rate."""
    n: int
    k: int
    d: int
    t_start: int | None = None
    t_stop: int | None = None
    t_step: int = 1
    exact_overlay: bool = True
    grid_points: int = 0

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.THETA

    def parameters(self) -> dict:
        return asdict(self)

    def run(self) -> ExperimentResult:
        params = make_params(self.n, self.k, self.d)
        half = self.k == self.n // 2
        if self.k != 2 and not half:
            raise ParameterError(f"theta curves exist for k = 2 and k = n/2 only (got k={self.k})", k=self.k)
        if self.t_step < 1:
            raise ParameterError(f"t_step must be >= 1 (got {self.t_step})", t_step=self.t_step)
        ts = timescales(params)
        t_start = ts.t_c if self.t_start is None else self.t_start
        t_stop = 4 * self.n if self.t_stop is None else self.t_stop
        times = list(range(t_start, t_stop + 1, self.t_step))
        _, lambda_1 = characteristic_rates(params)

        exact = None
        if self.exact_overlay:
            logs = relaxation_log_profile(params, t_stop + 1)[:, self.k - 2]
            exact = np.exp(np.diff(logs)) - lambda_1

        transition = rate_transition_half if half else rate_transition_k2
        asymptote = asymptote_half if half else asymptote_k2
        rows = []
        for t in times:
            rows.append({
                "t": t,
                "t_over_n": t / self.n,
                "t_over_n2": t / self.n**2,
                "regime": regime(params, t).value,
                "theory": transition(params, t),
                "short": asymptote(params, t, "short") if t > 0 else None,
                "long": asymptote(params, t, "long"),
                "exact": float(exact[t]) if exact is not None else None,
            })
        frames = {"theta": pd.DataFrame(rows)}
        if self.grid_points > 0:
            axis = np.linspace(-0.9, 0.9, self.grid_points)
            q = (axis[None, :] + 1j * axis[:, None]).ravel()
            q = q[np.abs(q) < 0.95]
            values = theta4_grid(q)
            frames["theta4_grid"] = pd.DataFrame({
                "re_q": q.real, "im_q": q.imag, "re_theta4": values.real, "im_theta4": values.imag,
            })
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames=frames,
            annotations={"t_c": ts.t_c, "lambda_1": lambda_1},
            summary=[("curve", "k = n/2" if half else "k = 2"), ("points", str(len(times)))],
        )


@dataclass
class PseudospectrumExperiment(Experiment):
    config: PerturbationConfig

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.PSEUDOSPECTRUM

    def parameters(self) -> dict:
        c = self.config
        return {
            "n": c.params.n, "d": c.params.d, "epsilons": list(c.epsilons), "seed": c.seed,
            "realizations": c.realizations, "precision_bits": c.precision_bits,
            "real_threshold": c.real_threshold, "threads": c.threads,
        }

    def run(self) -> ExperimentResult:
        result = sweep(self.config)
        params = self.config.params
        spectra = pd.DataFrame([row for snap in result.snapshots for row in snap.rows()])
        summary = pd.DataFrame(result.summary())
        smallest = [s for s in result.snapshots if s.epsilon == self.config.epsilons[0]]
        radius = float(np.mean([kernel_cloud_radius(s, params) for s in smallest]))
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"summary": summary, "spectra": spectra},
            annotations={
                "collision_epsilon": {j: collision_epsilon(params, j) for j in range(1, params.half + 1)},
                "kernel_cloud_radius_at_smallest_epsilon": radius,
            },
            summary=[
                ("spectra", str(len(result.snapshots))),
                ("kernel cloud radius", f"{radius:.4g}"),
            ],
        )


@dataclass
class MonteCarloExperiment(Experiment):
    """Haar-circuit averages against exact iteration for cuts 2..n-1."""
    n: int
    d: int
    t_max: int
    realizations: int
    seed: int
    threads: int = 1
    state_limit: int = 2**24
    min_realizations: int = 100
    sigmas: float = 3.0

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.MONTECARLO

    def parameters(self) -> dict:
        return asdict(self)

    def run(self) -> ExperimentResult:
        result = mc_average(
            self.n, self.d, self.t_max, self.realizations, self.seed,
            threads=self.threads, state_limit=self.state_limit, min_realizations=self.min_realizations,
        )
        frame = result.to_frame()
        params = make_params(self.n, 2, self.d)
        trajectory = iterate_trajectory(params, self.t_max, ArithmeticMode.RATIONAL, components=range(2, self.n))
        frame["exact"] = [
            float(trajectory.purity(k, t)) if 2 <= k <= self.n - 1 else None
            for k, t in zip(frame["k"], frame["t"])
        ]
        compared = frame.dropna(subset=["exact"])
        deviation = (compared["mean"] - compared["exact"]).abs()
        within = deviation <= self.sigmas * compared["stderr"] + 1e-12
        frame["within"] = within.reindex(frame.index)
        coverage = float(within.mean())
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"montecarlo": frame},
            annotations={"coverage": coverage, "sigmas": self.sigmas},
            summary=[
                ("realizations", str(self.realizations)),
                (f"cells within {self.sigmas:g} sigma", f"{coverage:.1%}"),
            ],
        )


@dataclass
class TimescalesExperiment(Experiment):
    n: int
    d: int

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.TIMESCALES

    def parameters(self) -> dict:
        return asdict(self)

    def run(self) -> ExperimentResult:
        frame = pd.DataFrame(
            [{"k": k, "t_K": ts.t_K, "t_c": ts.t_c, "t_inf": ts.t_inf} for k, ts in timescale_table(self.n, self.d)]
        )
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"timescales": frame},
            annotations=_rate_annotations(self.n, self.d),
            summary=[("cuts", str(len(frame)))],
        )


@dataclass
class EntropyExperiment(Experiment):
    """Second Renyi entropy S_2 = -ln I_k(t)."""
    n: int
    ks: tuple[int, ...]
    d: int
    t_max: int
    mode: str = ArithmeticMode.RATIONAL.value
    max_denominator_bits: int = DEFAULT_MAX_DENOMINATOR_BITS

    def get_experiment_type(self) -> ExperimentType:
        return ExperimentType.ENTROPY

    def parameters(self) -> dict:
        return {**asdict(self), "ks": list(self.ks)}

    def run(self) -> ExperimentResult:
        trajectory = iterate_trajectory(
            make_params(self.n, self.ks[0], self.d), self.t_max, ArithmeticMode(self.mode),
            components=self.ks, max_denominator_bits=self.max_denominator_bits,
        )
        entropy = second_renyi_entropy(trajectory)
        rows = [
            {"k": k, "t": t, "s2": float(entropy[t, col])}
            for col, k in enumerate(trajectory.components)
            for t in range(self.t_max + 1)
        ]
        return ExperimentResult(
            experiment=self.get_experiment_type(),
            parameters=self.parameters(),
            frames={"entropy": pd.DataFrame(rows)},
            annotations={"timescales": _timescale_annotations(self.n, self.ks, self.d)},
            summary=[("cuts", ", ".join(map(str, self.ks))), ("steps", str(self.t_max))],
        )
