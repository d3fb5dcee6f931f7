"""Disordered linear chains and related random tridiagonal matrices.

Exact and Monte Carlo computation of densities of states, integrated
densities of states, characteristic functions, Lyapunov exponents,
band-edge scaling functions, and anti-symmetric beta-ensemble spectra,
with the exact formulas cross-validated against independent
matrix-diagonalization oracles.
"""

__version__ = "0.1.0"

from . import betaens, chain, exact, lyapunov, schmidt, specfun, tridiag

__all__ = [
    "__version__",
    "betaens",
    "chain",
    "exact",
    "lyapunov",
    "schmidt",
    "specfun",
    "tridiag",
]
