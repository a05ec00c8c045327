"""
Base experiment interface for PhantomLab runs.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import pandas as pd


class ExperimentType(Enum):
    TRAJECTORY = "trajectory"
    RATES = "rates"
    COEFFICIENTS = "coefficients"
    MAGIC_SUMS = "magic-sums"
    KERNEL_CHECK = "kernel-check"
    THETA = "theta"
    PSEUDOSPECTRUM = "pseudospectrum"
    MONTECARLO = "montecarlo"
    TIMESCALES = "timescales"
    ENTROPY = "entropy"


@dataclass
class ExperimentResult:
    """Result of a completed experiment."""
    experiment: ExperimentType
    parameters: dict                 # everything needed to rerun, written to the manifest
    frames: dict[str, pd.DataFrame]  # table name -> data; the first table is the main output
    annotations: dict = field(default_factory=dict)   # timescales, tolerances, coverage...
    summary: list[tuple[str, str]] = field(default_factory=list)
    ok: bool = True                  # False makes the CLI exit 1 (failed checks)


class Experiment(ABC):
    """Abstract base class for all experiments."""

    @abstractmethod
    def get_experiment_type(self) -> ExperimentType:
        ...

    @abstractmethod
    def parameters(self) -> dict:
        """Plain, YAML-serializable description of the run."""
        ...

    @abstractmethod
    def run(self) -> ExperimentResult:
        ...
