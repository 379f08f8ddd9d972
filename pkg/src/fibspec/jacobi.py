"""Coupling parameters, periodic-approximant matrices and the eigenvalue oracle.

Two letter assignments ("cell conventions") are supported:

``"operator"``
    a -> (hopping 1, potential 0), b -> (hopping p, potential q).  This is the
    operator with both modulations on the minority letter b.
``"trace"``
    a -> (hopping 1, potential q), b -> (hopping p, potential 0).  The
    trace-map orbit started on the line of initial conditions tracks exactly
    the discriminants of this cell (see :func:`fibspec.tracemap.calibrate_cell`).
    Its spectrum is the mirror image ``lam -> q - lam`` of the operator one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fibword import fib_word, fibonacci

OPERATOR = "operator"
TRACE = "trace"
CONVENTIONS = (OPERATOR, TRACE)

MAX_ORACLE_SIZE = 2000
TOUCH_TOL = 1e-9


@dataclass(frozen=True)
class Coupling:
    """The pair (p, q) = (p(b), q(b)) with p(a) = 1, q(a) = 0."""

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if p == 0.0:
            raise ValueError("p must be nonzero")
        if not (math.isfinite(p) and math.isfinite(q)):
            raise ValueError("coupling must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    def hopping(self, letter: str) -> float:
        if letter == "a":
            return 1.0
        if letter == "b":
            return self.p
        raise ValueError(f"unknown letter {letter!r}")

    def potential(self, letter: str) -> float:
        if letter == "a":
            return 0.0
        if letter == "b":
            return self.q
        raise ValueError(f"unknown letter {letter!r}")

    def site(self, letter: str, convention: str = OPERATOR) -> tuple[float, float]:
        """(hopping, potential) carried by ``letter`` under ``convention``."""
        if convention == OPERATOR:
            return self.hopping(letter), self.potential(letter)
        if convention == TRACE:
            hop = self.hopping(letter)
            return hop, (self.q if letter == "a" else 0.0)
        raise ValueError(f"unknown cell convention {convention!r}")

    @property
    def z(self) -> float:
        """(1 + p^2) / (2p), the constant third coordinate of the initial line."""
        return (1.0 + self.p * self.p) / (2.0 * self.p)


def hopping(letter: str, c: Coupling) -> float:
    return c.hopping(letter)


def potential(letter: str, c: Coupling) -> float:
    return c.potential(letter)


def cell_arrays(word: str, c: Coupling, convention: str = OPERATOR):
    """Per-site hopping and potential arrays for ``word``."""
    table = {ch: c.site(ch, convention) for ch in "ab"}
    hop = np.array([table[ch][0] for ch in word], dtype=float)
    pot = np.array([table[ch][1] for ch in word], dtype=float)
    return hop, pot


def cell_matrix(hop, pot, phase: int = 1) -> np.ndarray:
    """Floquet-reduced matrix of a periodic cell.

    Site n has diagonal ``pot[n]``; the bond joining sites n-1 and n carries
    ``hop[n]``.  The bond closing the cell carries ``phase * hop[0]``.
    """
    if phase not in (1, -1):
        raise ValueError("phase must be +1 or -1")
    hop = np.asarray(hop, dtype=float)
    pot = np.asarray(pot, dtype=float)
    n = len(pot)
    if n < 2:
        raise ValueError("cell must have at least two sites")
    m = np.diag(pot)
    idx = np.arange(n - 1)
    m[idx, idx + 1] = hop[1:]
    m[idx + 1, idx] = hop[1:]
    # corners add when n == 2
    m[n - 1, 0] += phase * hop[0]
    m[0, n - 1] += phase * hop[0]
    return m


def periodic_matrix(k: int, c: Coupling, phase: int = 1,
                    convention: str = OPERATOR) -> np.ndarray:
    """F_k x F_k matrix of the level-k periodic approximant at phase +1 or -1."""
    if k < 2:
        raise ValueError(f"level must be >= 2, got {k}")
    hop, pot = cell_arrays(fib_word(k), c, convention)
    return cell_matrix(hop, pot, phase)


def eigenvalues_symmetric(m) -> np.ndarray:
    """Ascending eigenvalues of a dense real symmetric matrix (LAPACK syevd)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if m.shape[0] > MAX_ORACLE_SIZE:
        raise ValueError(f"matrix size {m.shape[0]} exceeds oracle cap {MAX_ORACLE_SIZE}")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigvalsh(m)


def floquet_bands(periodic, antiperiodic, tol: float = TOUCH_TOL):
    """Pair sorted periodic/antiperiodic eigenvalues into bands.

    Returns an array of shape (n, 2) of band edges, one row per band, before
    merging touching bands.
    """
    per = np.asarray(periodic, dtype=float)
    anti = np.asarray(antiperiodic, dtype=float)
    if per.shape != anti.shape or per.ndim != 1:
        raise ValueError("need equally many periodic and antiperiodic eigenvalues")
    vals = np.concatenate([per, anti])
    src = np.concatenate([np.zeros(len(per), int), np.ones(len(anti), int)])
    order = np.argsort(vals, kind="stable")
    vals, src = vals[order], src[order]
    edges = vals.reshape(-1, 2)
    srcs = src.reshape(-1, 2)
    scale = max(1.0, float(np.abs(vals).max()))
    bad = (srcs[:, 0] == srcs[:, 1]) & (edges[:, 1] - edges[:, 0] > tol * scale)
    if bad.any():
        raise ArithmeticError("Floquet interlacing failed")
    return edges


def band_edges_oracle(k: int, c: Coupling, convention: str = OPERATOR):
    """Band set of the level-k approximant from periodic/antiperiodic spectra."""
    from .intervals import IntervalSet

    if fibonacci(k) > MAX_ORACLE_SIZE:
        raise ValueError(f"F_{k} = {fibonacci(k)} exceeds oracle cap {MAX_ORACLE_SIZE}")
    per = eigenvalues_symmetric(periodic_matrix(k, c, 1, convention))
    anti = eigenvalues_symmetric(periodic_matrix(k, c, -1, convention))
    return IntervalSet(floquet_bands(per, anti), merge_tol=TOUCH_TOL)
