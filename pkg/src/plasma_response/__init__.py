"""Transverse conductivity and dielectric function of a non-degenerate quantum collisional plasma."""

__version__ = "0.1.0"

from .errors import DomainError, NumericalError, ParameterError, PlasmaResponseError
from .fermi import f2, f2_moment_form, f_sum_weight, fermi_dirac, g, g_double_prime, g_prime
from .kernels import SpectralPoint, j_kernel, j_kernel_oracle
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, QuadratureResult
from .response import (ResponseParams, ResponseResult, epsilon_tr, sigma2_2d, sigma_1, sigma_2,
                       sigma_classical, sigma_high_q_limit, sigma_longwave, sigma_quantum,
                       sigma_quantum_small_hbar, sigma_tr)

__all__ = [
    "DEFAULT_CONFIG", "DomainError", "NumericalError", "ParameterError", "PlasmaResponseError",
    "QuadratureConfig", "QuadratureResult", "ResponseParams", "ResponseResult", "SpectralPoint",
    "epsilon_tr", "f2", "f2_moment_form", "f_sum_weight", "fermi_dirac", "g", "g_double_prime",
    "g_prime", "j_kernel", "j_kernel_oracle", "sigma2_2d", "sigma_1", "sigma_2", "sigma_classical",
    "sigma_high_q_limit", "sigma_longwave", "sigma_quantum", "sigma_quantum_small_hbar", "sigma_tr",
]
