from .base import Experiment, ExperimentResult, ExperimentType
from .experiments import (
    CoefficientsExperiment,
    EntropyExperiment,
    KernelCheckExperiment,
    MagicSumsExperiment,
    MonteCarloExperiment,
    PseudospectrumExperiment,
    RatesExperiment,
    ThetaExperiment,
    TimescalesExperiment,
    TrajectoryExperiment,
)
from .manager import LabManager
