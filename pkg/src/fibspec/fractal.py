"""Box-counting dimension of interval covers and local dimension profiles."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _backend
from .intervals import IntervalSet
from .jacobi import Coupling
from .spectrum import DEFAULT_TOL, approx_spectrum

CONVERGED_R2 = 0.98
DEFAULT_SCALES = 12
EDGE_FACTOR = 20.0  # smallest scale, in units of the construction tolerance
# Dimension covers use the Floquet bands of two consecutive levels: C = 1.
COVER_BOUND = 1.0
COARSEST_CELLS = 32.0
DEFAULT_SHIFTS = 8


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    stderr: float  # max(fit_stderr, drift / 2)
    r_squared: float
    scales: tuple[float, float]
    n_points: int
    slope: float = float("nan")  # unclipped regression slope
    fit_stderr: float = 0.0  # least-squares standard error alone
    drift: float = 0.0  # |slope(fine half) - slope(coarse half)|

    @property
    def converged(self) -> bool:
        return self.r_squared >= CONVERGED_R2

    def as_dict(self) -> dict:
        return {
            "estimate": self.value,
            "stderr": self.stderr,
            "r2": self.r_squared,
            "fit_stderr": self.fit_stderr,
            "drift": self.drift,
            "scales": list(self.scales),
            "n_points": self.n_points,
            "converged": self.converged,
        }


def box_count(s: IntervalSet, eps: float, anchor: float = 0.0) -> int:
    """Number of cells [anchor + j eps, anchor + (j+1) eps) meeting ``s``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not s:
        raise ValueError("empty set")
    return _backend.box_count(s.lefts, s.rights, float(eps), float(anchor))


def default_scale_range(s: IntervalSet, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(eps_min, eps_max) for a finite cover.

    eps_max is 1/32 of the diameter: coarser grids hold too few cells for
    the count to scale cleanly.  Below the length of the typical
    component the cover looks one-dimensional, so eps_min is the larger of
    20 tol and the median component length.  Sets made of a few long
    intervals are measured three decades below eps_max instead.
    """
    diam = s.diameter
    if diam == 0.0:
        return EDGE_FACTOR * tol, 1.0
    hi = diam / COARSEST_CELLS
    lo = max(EDGE_FACTOR * tol, float(np.median(s.lengths)))
    if lo > hi / 4.0:
        # few, long components: the set is a finite union of intervals
        lo = max(EDGE_FACTOR * tol, hi * 1e-3)
    return lo, hi


def _slope(x, y):
    if np.ptp(y) == 0.0:
        return 0.0, 0.0, 1.0
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.stderr), float(fit.rvalue ** 2)


def box_dimension(s: IntervalSet, eps_range: tuple[float, float] | None = None,
                  n_scales: int = DEFAULT_SCALES, tol: float = DEFAULT_TOL,
                  anchor: float = 0.0, n_shifts: int = DEFAULT_SHIFTS) -> DimensionEstimate:
    """Least-squares slope of log N(eps) against log(1/eps).

    N(eps) is averaged over ``n_shifts`` grids offset by multiples of
    eps / n_shifts from ``anchor``, which damps the alignment noise of a
    single grid.  Residuals of the fit are correlated, so the reported
    stderr is the larger of the fit's standard error and half the slope
    change between the coarse and fine halves of the scale range.
    """
    if n_scales < 5:
        raise ValueError("n_scales must be >= 5")
    if n_shifts < 1:
        raise ValueError("n_shifts must be >= 1")
    if not s:
        raise ValueError("empty set")
    lo, hi = default_scale_range(s, tol) if eps_range is None else map(float, eps_range)
    if not (0 < lo < hi) or hi / lo < 2.0:
        raise ValueError(f"degenerate scaling range [{lo:g}, {hi:g}]")
    eps = np.geomspace(lo, hi, n_scales)
    counts = np.array([
        np.mean([box_count(s, e, anchor + e * j / n_shifts) for j in range(n_shifts)])
        for e in eps
    ])
    x = -np.log(eps)
    y = np.log(counts)
    slope, se, r2 = _slope(x, y)
    h = n_scales // 2
    drift = abs(_slope(x[:h + 1], y[:h + 1])[0] - _slope(x[h - 1:], y[h - 1:])[0])
    return DimensionEstimate(min(max(slope, 0.0), 1.0), max(se, drift / 2.0), r2, (lo, hi),
                             n_scales, slope, se, drift)


def middle_cantor_cover(alpha: float, level: int, lo: float = 0.0, hi: float = 1.0) -> IntervalSet:
    """Level-``level`` cover of the middle-alpha Cantor set on [lo, hi]."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if level < 0:
        raise ValueError("level must be >= 0")
    r = (1.0 - alpha) / 2.0
    lefts = np.array([0.0])
    for j in range(level):
        lefts = np.concatenate([lefts, lefts + (1.0 - r) * r ** j])
    lefts.sort()
    width = r ** level
    scale = hi - lo
    return IntervalSet(np.column_stack([lo + scale * lefts, lo + scale * (lefts + width)]),
                       merge_tol=0.0)


def cantor_dimension(alpha: float) -> float:
    return math.log(2.0) / math.log(2.0 / (1.0 - alpha))


def spectral_cover(c: Coupling, k: int, bound_C: float | None = COVER_BOUND,
                   tol: float = DEFAULT_TOL) -> IntervalSet:
    return approx_spectrum(k, c, bound_C, tol)


def local_dimension(c: Coupling, window: tuple[float, float], k: int,
                    n_scales: int = DEFAULT_SCALES, bound_C: float | None = COVER_BOUND,
                    tol: float = DEFAULT_TOL, cover: IntervalSet | None = None) -> DimensionEstimate:
    """Box dimension of the level-k cover restricted to ``window``."""
    s = spectral_cover(c, k, bound_C, tol) if cover is None else cover
    part = s.clip(*window)
    if not part:
        raise ValueError("window misses spectrum")
    return box_dimension(part, None, n_scales, tol)


def _windows(s: IntervalSet, n_windows: int) -> list[tuple[float, float]]:
    """Split the components of ``s`` into groups of (nearly) equal count."""
    idx = np.array_split(np.arange(len(s)), n_windows)
    return [(float(s.lefts[g[0]]), float(s.rights[g[-1]])) for g in idx if len(g)]


def _pool_map(fn, items, workers: int | None):
    if workers is None or workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def dimension_profile(c: Coupling, n_windows: int, k: int, n_scales: int = DEFAULT_SCALES,
                      bound_C: float | None = COVER_BOUND, tol: float = DEFAULT_TOL,
                      workers: int | None = None) -> list[tuple[float, DimensionEstimate]]:
    """Local dimensions over equal-count windows of the level-k cover."""
    if n_windows < 3:
        raise ValueError("n_windows must be >= 3")
    s = spectral_cover(c, k, bound_C, tol)
    if len(s) < n_windows:
        raise ValueError(f"cover has {len(s)} components, fewer than {n_windows} windows")
    wins = _windows(s, n_windows)
    ests = _pool_map(lambda w: local_dimension(c, w, k, n_scales, bound_C, tol, cover=s),
                     wins, workers)
    return [(0.5 * (w[0] + w[1]), e) for w, e in zip(wins, ests)]


def global_dimension(c: Coupling, k: int, n_scales: int = DEFAULT_SCALES,
                     bound_C: float | None = COVER_BOUND, tol: float = DEFAULT_TOL) -> DimensionEstimate:
    return box_dimension(spectral_cover(c, k, bound_C, tol), None, n_scales, tol)


def dimension_vs_params(path, k: int, n_scales: int = DEFAULT_SCALES,
                        bound_C: float | None = COVER_BOUND, tol: float = DEFAULT_TOL,
                        workers: int | None = None) -> list[tuple[Coupling, DimensionEstimate]]:
    """Global box dimension along a path of couplings."""
    path = [c if isinstance(c, Coupling) else Coupling(*c) for c in path]
    ests = _pool_map(lambda c: global_dimension(c, k, n_scales, bound_C, tol), path, workers)
    return list(zip(path, ests))
