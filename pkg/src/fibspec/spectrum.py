"""Band sets, trace-bounded sets and escape-time covers of the spectrum.

All sets here are sets of energies ``lam`` described by the trace-map orbit
of ``gamma(lam)``.  They are the spectra of the periodic cells in the
``"trace"`` convention (see :mod:`fibspec.jacobi`); :func:`to_operator`
mirrors them onto the ``"operator"`` convention.

Bands are isolated without sampling.  The Dirichlet eigenvalues of the
level-k cell (one site removed, no closing bond) interlace with the bands:
each closed gap holds exactly one of them.  Between two consecutive
Dirichlet eigenvalues x_k therefore changes sign exactly once, inside the
single band there, and both band edges follow by bisection.  Inside a gap
|x_k| is unimodal, which settles the level sets {|x_k| <= C} for C > 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import _backend
from .fibword import fib_word, fibonacci
from .intervals import IntervalSet
from .jacobi import TOUCH_TOL, TRACE, Coupling, cell_arrays
from .tracemap import check_bound, default_bound

DEFAULT_TOL = 1e-10
TOUCH_HEIGHT = 1e-12  # gap humps this close to 1 are closed gaps
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class BandCountError(ArithmeticError):
    """Root isolation produced a band count inconsistent with F_k."""


def search_bounds(c: Coupling) -> tuple[float, float]:
    """[-R, R] with R = 2 max(1, |p|) + |q|; contains every spectrum."""
    r = 2.0 * max(1.0, abs(c.p)) + abs(c.q)
    return -r, r


def trace_poly_eval(k: int, lam, c: Coupling, with_flag: bool = False):
    """Half-trace x_k(lam) by iterating the trace map from gamma(lam).

    Values whose magnitude would exceed 1e150 are saturated at +-1e150;
    ``with_flag=True`` also returns a boolean marking those.
    """
    if k < -1:
        raise ValueError(f"level must be >= -1, got {k}")
    lam_arr = np.asarray(lam, dtype=float)
    xk, _, _ = _backend.trace_pair(lam_arr, c.p, c.q, k)
    sat = np.abs(xk) >= 1e150
    if lam_arr.ndim == 0:
        xk, sat = float(xk), bool(sat)
    return (xk, sat) if with_flag else xk


# -- level-set machinery ---------------------------------------------------

def _xk(c: Coupling, k: int, lam):
    return _backend.trace_pair(np.asarray(lam, dtype=float), c.p, c.q, k)[0]


def _golden_abs(c: Coupling, k: int, a, b, maximize: bool, iters: int = 60):
    """Vectorized golden-section search for an extremum of |x_k| on [a, b]."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    sgn = -1.0 if maximize else 1.0
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = sgn * np.abs(_xk(c, k, x1))
    f2 = sgn * np.abs(_xk(c, k, x2))
    for _ in range(iters):
        left = f1 < f2  # optimum lies in [a, x2]
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        nx1 = np.where(left, b - _GOLDEN * (b - a), x2)
        nx2 = np.where(left, x1, a + _GOLDEN * (b - a))
        nf1 = np.where(left, np.nan, f2)
        nf2 = np.where(left, f1, np.nan)
        need = np.where(left, nx1, nx2)
        fv = sgn * np.abs(_xk(c, k, need))
        f1 = np.where(left, fv, nf1)
        f2 = np.where(left, nf2, fv)
        x1, x2 = nx1, nx2
    best = np.where(f1 < f2, x1, x2)
    return best, np.abs(_xk(c, k, best))


def _bisect_sign(c: Coupling, k: int, lo, hi, tol: float):
    """Sign change of x_k in each bracket [lo, hi]."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    s_lo = np.signbit(_xk(c, k, lo))
    for _ in range(200):
        act = hi - lo > tol
        if not act.any():
            break
        mid = 0.5 * (lo + hi)
        same = np.signbit(_xk(c, k, mid)) == s_lo
        lo = np.where(act & same, mid, lo)
        hi = np.where(act & ~same, mid, hi)
    return 0.5 * (lo + hi)


def dirichlet_eigenvalues(k: int, c: Coupling) -> np.ndarray:
    """F_k - 1 Dirichlet eigenvalues of the level-k trace-convention cell."""
    if k < 2:
        return np.empty(0)
    # the orbit traces fib_word(k) in this convention, see tracemap.calibrate_cell
    hop, pot = cell_arrays(fib_word(k), c, TRACE)
    if len(pot) == 2:
        return pot[1:].copy()
    # sterf: O(n) memory (the default driver allocates n x n workspace)
    return eigvalsh_tridiagonal(pot[1:], hop[2:], check_finite=False, lapack_driver="sterf")


def _outer(c: Coupling, k: int, bound: float) -> tuple[float, float]:
    """Window whose ends satisfy |x_k| > bound; x_k is monotone beyond the bands."""
    lo, hi = search_bounds(c)
    lo, hi = lo - bound, hi + bound
    while abs(_xk(c, k, lo)) <= bound or abs(_xk(c, k, hi)) <= bound:
        lo, hi = 2.0 * lo, 2.0 * hi
    return lo, hi


def _inside(c: Coupling, k: int, lam, bound: float = 1.0):
    return np.abs(_xk(c, k, lam)) <= bound


def _subbands(c: Coupling, k: int, tol: float) -> np.ndarray:
    """The F_k Floquet bands of level k, one row each, ordered."""
    lo, hi = _outer(c, k, 1.0)
    mu = np.concatenate([[lo], dirichlet_eigenvalues(k, c), [hi]])
    root = _bisect_sign(c, k, mu[:-1], mu[1:], tol)
    # On [mu_j, root_j] the band is [edge, root_j].  A Dirichlet value may sit
    # on an edge of either neighbour, so step off it before bisecting.
    a = mu[:-1].copy()
    on = _inside(c, k, a)
    a[on] = np.minimum(a[on] + tol, root[on])
    shut_l = on & _inside(c, k, a)
    left = _backend.bisect_level(a, root, c.p, c.q, k, 1.0, tol)[1]
    left[shut_l] = mu[:-1][shut_l]
    b = mu[1:].copy()
    on = _inside(c, k, b)
    b[on] = np.maximum(b[on] - tol, root[on])
    shut_r = on & _inside(c, k, b)
    right = _backend.bisect_level(root, b, c.p, c.q, k, 1.0, tol)[0]
    right[shut_r] = mu[1:][shut_r]
    # rounding hides closed gaps: |x_k| - 1 is quadratic there
    if len(mu) > 2:
        g_lo, g_hi = right[:-1], left[1:]
        gap = g_hi > g_lo
        if gap.any():
            arg, top = _golden_abs(c, k, g_lo[gap], g_hi[gap], maximize=True)
            shut = top <= 1.0 + TOUCH_HEIGHT
            idx = np.flatnonzero(gap)[shut]
            right[idx] = arg[shut]
            left[idx + 1] = arg[shut]
    return np.column_stack([left, right])


def _level_set(c: Coupling, k: int, bound: float, sub: np.ndarray, tol: float) -> np.ndarray:
    """Components of {|x_k| <= bound}, bound >= 1, from the level-k bands."""
    if bound == 1.0:
        return sub
    g_lo, g_hi = sub[:-1, 1], sub[1:, 0]
    arg, top = _golden_abs(c, k, g_lo, g_hi, maximize=True)
    open_gap = top > bound
    # components break at gaps whose hump rises above the bound
    lo_out, hi_out = _outer(c, k, bound)
    l_edge = _backend.bisect_level(np.array([lo_out]), sub[:1, 0], c.p, c.q, k, bound, tol)[1]
    r_edge = _backend.bisect_level(sub[-1:, 1], np.array([hi_out]), c.p, c.q, k, bound, tol)[0]
    ends = _backend.bisect_level(g_lo[open_gap], arg[open_gap], c.p, c.q, k, bound, tol)[0]
    starts = _backend.bisect_level(arg[open_gap], g_hi[open_gap], c.p, c.q, k, bound, tol)[1]
    lefts = np.concatenate([l_edge, starts])
    rights = np.concatenate([ends, r_edge])
    return np.column_stack([lefts, rights])


def _checked_bound(c: Coupling, bound_C):
    if bound_C is None:
        return default_bound(c)
    if not bound_C >= 1.0:
        raise ValueError("bound_C must be >= 1")
    return float(bound_C)


def _checked_tol(tol: float) -> float:
    if not tol > 0:
        raise ValueError("tol must be positive")
    return float(tol)


def trace_bounded_set(k: int, c: Coupling, bound_C: float | None = None,
                      tol: float = DEFAULT_TOL) -> IntervalSet:
    """{lam : |x_k(lam)| <= C} as an IntervalSet."""
    if k < 0:
        raise ValueError("level must be >= 0")
    bound = _checked_bound(c, bound_C)
    tol = _checked_tol(tol)
    sub = _subbands(c, k, tol)
    return IntervalSet(_level_set(c, k, bound, sub, tol), merge_tol=TOUCH_TOL)


def approx_spectrum(k: int, c: Coupling, bound_C: float | None = None,
                    tol: float = DEFAULT_TOL) -> IntervalSet:
    """{|x_k| <= C} u {|x_{k+1}| <= C}."""
    return trace_bounded_set(k, c, bound_C, tol) | trace_bounded_set(k + 1, c, bound_C, tol)


def approx_spectrum_levels(kmax: int, c: Coupling, bound_C: float | None = None,
                           tol: float = DEFAULT_TOL) -> list[IntervalSet]:
    """approx_spectrum(k) for k = 0..kmax, sharing the per-level sets."""
    sets = [trace_bounded_set(j, c, bound_C, tol) for j in range(kmax + 2)]
    return [sets[j] | sets[j + 1] for j in range(kmax + 1)]


# -- Floquet bands -----------------------------------------------------------

@dataclass
class BandLevel:
    k: int
    coupling: Coupling
    bands: IntervalSet
    subbands: np.ndarray  # (F_k, 2) individual Floquet bands, touching ones split
    orientation: np.ndarray  # sign of x_k at each subband's left edge
    touchings: int
    discriminant_samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def band_count(self) -> int:
        return len(self.bands)


def bands(k: int, c: Coupling, tol: float = DEFAULT_TOL,
          sample_discriminant: bool = False) -> BandLevel:
    """Floquet spectrum {|x_k| <= 1} of the level-k approximant."""
    if k < 2:
        raise ValueError(f"level must be >= 2, got {k}")
    tol = _checked_tol(tol)
    fk = fibonacci(k)
    sub = _subbands(c, k, tol)
    if len(sub) > fk:
        raise BandCountError(f"spurious roots: {len(sub)} bands at level {k}, F_k = {fk}")
    mids = 0.5 * (sub[:, 0] + sub[:, 1])
    if (np.any(sub[:, 1] < sub[:, 0]) or np.any(sub[1:, 0] < sub[:-1, 1] - tol)
            or np.any(np.abs(_xk(c, k, mids)) > 1.0)):
        raise BandCountError(f"band isolation failed at level {k}")
    merged = IntervalSet(sub, merge_tol=TOUCH_TOL)
    touch = fk - len(merged)
    orient = np.where(_xk(c, k, sub[:, 0]) >= 0, 1.0, -1.0)
    samples = None
    if sample_discriminant:
        lo, hi = merged.hull
        grid = np.linspace(lo, hi, 8 * fk + 1)
        samples = np.column_stack([grid, _xk(c, k, grid)])
    return BandLevel(k, c, merged, sub, orient, touch, samples)


def to_operator(s: IntervalSet, c: Coupling) -> IntervalSet:
    """Mirror a trace-convention set onto the operator convention (lam -> q - lam)."""
    return s.mirror(c.q)


def operator_bands(k: int, c: Coupling, tol: float = DEFAULT_TOL) -> IntervalSet:
    return to_operator(bands(k, c, tol).bands, c)


# -- escape-time cover -------------------------------------------------------

def escape_spectrum(c: Coupling, depth: int = 30, resolution: float = 1e-4,
                    bound_C: float | None = None) -> IntervalSet:
    """Cover of the set of energies whose orbit is not escaped by ``depth``.

    Dyadic cells of the search window are discarded once interval arithmetic
    certifies that every energy in the cell escapes; surviving cells are
    split until their width is at most ``resolution / 2``.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    bound = default_bound(c) if bound_C is None else float(bound_C)
    check_bound(c, bound)
    lo, hi = search_bounds(c)
    lo -= resolution
    hi += resolution
    target = resolution / 2.0
    cells = np.array([[lo, hi]])
    while True:
        esc = _backend.interval_escaped(cells[:, 0], cells[:, 1], c.p, c.q, bound, depth)
        cells = cells[~esc]
        if len(cells) == 0 or cells[0, 1] - cells[0, 0] <= target:
            break
        mid = 0.5 * (cells[:, 0] + cells[:, 1])
        cells = np.column_stack([
            np.column_stack([cells[:, 0], mid]).ravel(),
            np.column_stack([mid, cells[:, 1]]).ravel(),
        ])
    return IntervalSet(cells, merge_tol=0.0)


def escape_mask(lams, c: Coupling, depth: int, bound_C: float | None = None):
    """True where the orbit escapes by level ``depth``."""
    bound = default_bound(c) if bound_C is None else float(bound_C)
    check_bound(c, bound)
    return _backend.escape_index(np.asarray(lams, dtype=float), c.p, c.q, bound, depth) >= 0


def measure_scan(c: Coupling, kmin: int, kmax: int, bound_C: float | None = None,
                 tol: float = DEFAULT_TOL):
    """Rows (k, band_count, measure) of approx_spectrum for k = kmin..kmax."""
    levels = approx_spectrum_levels(kmax, c, bound_C, tol)
    return [(k, len(levels[k]), levels[k].measure) for k in range(kmin, kmax + 1)]


def bounded_seeds(c: Coupling, n: int, rng: np.random.Generator, depth: int = 40,
                  k: int = 16, tries: int = 20) -> np.ndarray:
    """Up to n energies whose orbit is not escaped by ``depth``.

    Candidates are drawn uniformly from the level-k bands, which hold the
    spectrum's neighbourhood, and kept when the escape test stays silent.
    """
    sub = bands(k, c).subbands
    out = []
    have = 0
    for _ in range(tries):
        j = rng.integers(0, len(sub), 8 * n)
        lam = rng.uniform(sub[j, 0], sub[j, 1])
        lam = lam[~escape_mask(lam, c, depth)]
        out.append(lam)
        have += len(lam)
        if have >= n:
            break
    return np.concatenate(out)[:n]
