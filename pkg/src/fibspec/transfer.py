"""Transfer-matrix cocycle of the periodic approximants.

Site matrices follow T_n = (1/p_n) [[lam - q_n, -1], [p_n^2, 0]]; products
are ordered with site 1 rightmost.
"""
from __future__ import annotations

import numpy as np

from . import _backend
from .jacobi import OPERATOR, Coupling

_CODES = np.zeros(256, dtype=np.uint8)
_CODES[ord("b")] = 1


def _codes(w: str) -> np.ndarray:
    if not w:
        raise ValueError("empty input")
    return _CODES[np.frombuffer(w.encode("ascii"), dtype=np.uint8)]


def site_matrix(letter: str, lam: float, c: Coupling, convention: str = OPERATOR) -> np.ndarray:
    p, q = c.site(letter, convention)
    return np.array([[lam - q, -1.0], [p * p, 0.0]]) / p


def cocycle_product(w: str, lam: float, c: Coupling, convention: str = OPERATOR) -> np.ndarray:
    """T_{|w|} ... T_1 for the letters of ``w``; plain float64, no rescaling."""
    if not w:
        raise ValueError("empty input")
    m = np.eye(2)
    for letter in w:
        m = site_matrix(letter, lam, c, convention) @ m
    return m


def _tables(c: Coupling, convention: str):
    sa, sb = c.site("a", convention), c.site("b", convention)
    return (sa[0], sb[0]), (sa[1], sb[1])


def half_trace(w: str, lam, c: Coupling, convention: str = OPERATOR):
    """Signed half-trace of the cocycle over ``w``; vectorized over ``lam``.

    Long products are rescaled internally; values past float range come back
    as +-inf (use :func:`log_abs_half_trace` for their magnitude).
    """
    hop, pot = _tables(c, convention)
    val, _ = _backend.cocycle_half_trace(_codes(w), np.asarray(lam, dtype=float), hop, pot)
    return val if np.ndim(lam) else float(val)


def log_abs_half_trace(w: str, lam, c: Coupling, convention: str = OPERATOR):
    """log10 of |half_trace|, finite even when the value itself overflows."""
    hop, pot = _tables(c, convention)
    _, lg = _backend.cocycle_half_trace(_codes(w), np.asarray(lam, dtype=float), hop, pot)
    return lg if np.ndim(lam) else float(lg)


def fundamental_discriminant(w: str, lam: float, c: Coupling, convention: str = OPERATOR) -> float:
    """(phi_{F} + psi_{F-1}) / 2 from the two fundamental solutions of the
    periodic difference equation, with phi_0 = psi_{-1} = 1, phi_{-1} = psi_0 = 0.

    Runs the three-term recurrence directly, without 2x2 matrices.
    """
    n = len(w)
    hop = [c.site(ch, convention)[0] for ch in w]
    pot = [c.site(ch, convention)[1] for ch in w]

    def p_at(i):  # periodic extension, sites 1..n
        return hop[(i - 1) % n]

    def q_at(i):
        return pot[(i - 1) % n]

    def run(theta_m1, theta_0, upto):
        prev, cur = theta_m1, theta_0
        vals = {-1: prev, 0: cur}
        for i in range(0, upto):
            # p_{i+1} theta_{i+1} = (lam - q_i) theta_i - p_i theta_{i-1}
            nxt = ((lam - q_at(i)) * cur - p_at(i) * prev) / p_at(i + 1)
            prev, cur = cur, nxt
            vals[i + 1] = cur
        return vals

    phi = run(0.0, 1.0, n)
    psi = run(1.0, 0.0, n)
    return 0.5 * (phi[n] + psi[n - 1])
