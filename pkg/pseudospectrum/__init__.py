from .eigensolver import balance, eigenvalues, hessenberg_reduce, make_context
from .perturbation import (
    PerturbationConfig,
    SpectrumSnapshot,
    SweepResult,
    collision_epsilon,
    decade_grid,
    kernel_cloud_radius,
    perturbed_spectrum,
    sample_perturbation,
    sweep,
    theory_real_count,
)
