"""Spectral numerics for the tridiagonal Fibonacci Hamiltonian.

Fibonacci words, periodic Jacobi cells, the Fibonacci trace map, band sets,
box-counting dimensions and the integrated density of states.
"""
from ._backend import NAME as BACKEND
from .fibword import fib_word, fibonacci, omega_s_window, substitute
from .intervals import IntervalSet
from .jacobi import Coupling, band_edges_oracle, periodic_matrix
from .spectrum import (
    BandLevel,
    approx_spectrum,
    bands,
    escape_spectrum,
    search_bounds,
    trace_bounded_set,
    trace_poly_eval,
)
from .tracemap import escape_time, gamma, invariant, step

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BandLevel",
    "Coupling",
    "IntervalSet",
    "__version__",
    "approx_spectrum",
    "band_edges_oracle",
    "bands",
    "escape_spectrum",
    "escape_time",
    "fib_word",
    "fibonacci",
    "gamma",
    "invariant",
    "omega_s_window",
    "periodic_matrix",
    "search_bounds",
    "step",
    "substitute",
    "trace_bounded_set",
    "trace_poly_eval",
]
