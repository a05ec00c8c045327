from .haar import CircuitState, apply_gate, apply_staircase_layer, purities, purity_of_cut, sample_haar_gate
from .montecarlo import MCResult, RandomStateEstimate, mc_average, random_state_purity, single_realization
