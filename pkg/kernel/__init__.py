from .basis import (
    KernelBasis,
    kernel_left_vectors,
    kernel_matrix,
    kernel_right_vectors,
    lift_to_A,
    rescale_alpha,
    steady_state_partner,
)
from .contribution import CancellationReport, cancellation_check, kernel_power_contribution
