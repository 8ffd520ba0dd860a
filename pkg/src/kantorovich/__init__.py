"""Sampling Kantorovich operators: kernels, signals, series evaluation and jump analysis."""
from .kernels import (KernelError, KernelSpec, Truncation, classify_jump_behavior,
                      discrete_moment, fourier_transform, lattice_sum, make_kernel, psi_minus,
                      psi_plus, validate_kernel)
from .signals import Signal, SignalError
from .operators import (OperatorParams, generalized_sampling_eval, kantorovich_eval,
                        kantorovich_series, predict_causal)
from .analysis import (NON_CONVERGENT, error_bound, jump_convergence_scan,
                       jump_limit_value, jump_decompose, rate_experiment)

__version__ = "0.1.0"
