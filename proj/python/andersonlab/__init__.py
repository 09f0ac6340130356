"""Renormalized Anderson Hamiltonian laboratory on the 2d and 3d torus.

Fields are numpy arrays of Fourier coefficients with shape (M,) * dim in FFT
order, so ``values(c)`` equals ``numpy.fft.ifftn(c) * M**dim``.
"""

from ._andersonlab import (
    Anderson2d,
    ConfigError,
    ConvergenceError,
    besov_norm,
    free_propagate,
    laplacian_scaling,
    lp_norm,
    mode,
    para_gt,
    para_lt,
    product,
    renorm_constant_2d,
    renorm_constants_3d,
    resonant,
    sobolev_norm,
    values,
    white_noise,
)

__version__ = "0.1.0"

__all__ = [
    "Anderson2d",
    "ConfigError",
    "ConvergenceError",
    "besov_norm",
    "free_propagate",
    "laplacian_scaling",
    "lp_norm",
    "mode",
    "para_gt",
    "para_lt",
    "product",
    "renorm_constant_2d",
    "renorm_constants_3d",
    "resonant",
    "sobolev_norm",
    "values",
    "white_noise",
]
