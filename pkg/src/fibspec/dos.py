"""Integrated density of states of the periodic approximants.

Every Floquet band of the level-k cell carries weight 1/F_k.  Inside a band
the weight is spread by the normalized quasimomentum arccos(+-x_k)/pi, which
is exact for the periodic operator; with edges resolved to tol the in-band
values are accurate to O(sqrt(tol)).  Energies follow the spectrum module
(trace convention) unless ``convention="operator"`` is requested.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from .fractal import CONVERGED_R2, DimensionEstimate, local_dimension, spectral_cover
from .jacobi import OPERATOR, TRACE, Coupling
from .spectrum import DEFAULT_TOL, _xk, bands

POINTWISE_R2 = 0.9
BAND_FACTOR = 4.0  # smallest pointwise scale, in containing-band widths
COARSEST_SCALE = 1.0 / 64.0  # largest pointwise scale, as a fraction of the hull


@dataclass(frozen=True)
class IdsFunction:
    k: int
    coupling: Coupling
    subbands: np.ndarray  # (F_k, 2), trace convention
    orientation: np.ndarray  # sign of x_k at each left edge
    convention: str = TRACE

    @property
    def n_bands(self) -> int:
        return len(self.subbands)

    @property
    def breakpoints(self) -> np.ndarray:
        edges = self.subbands.ravel()
        return edges if self.convention == TRACE else np.sort(self.coupling.q - edges)

    @property
    def values(self) -> np.ndarray:
        return self(self.breakpoints)

    def _theta(self, lam, j) -> np.ndarray:
        s = np.clip(self.orientation[j] * _xk(self.coupling, self.k, lam), -1.0, 1.0)
        return np.arccos(s) / np.pi

    @cached_property
    def _edge_theta(self) -> tuple[np.ndarray, np.ndarray]:
        # edges are resolved to tol, where arccos is off by O(sqrt(tol));
        # rescaling by the edge values keeps N continuous
        j = np.arange(self.n_bands)
        return self._theta(self.subbands[:, 0], j), self._theta(self.subbands[:, 1], j)

    def _trace_ids(self, lam: np.ndarray) -> np.ndarray:
        sub = self.subbands
        j = np.searchsorted(sub[:, 0], lam, side="right") - 1
        jc = np.clip(j, 0, self.n_bands - 1)
        inside = (j >= 0) & (lam <= sub[jc, 1])
        # x_k is monotone in a band, so theta runs 0 -> 1 left to right
        t0, t1 = self._edge_theta
        span = t1[jc] - t0[jc]
        theta = np.where(span > 0, (self._theta(lam, jc) - t0[jc]) / np.where(span > 0, span, 1.0), 0.0)
        theta = np.clip(theta, 0.0, 1.0)
        return np.where(inside, (jc + theta) / self.n_bands, (j + 1) / self.n_bands)

    def __call__(self, lam):
        lam_arr = np.asarray(lam, dtype=float)
        if self.convention == TRACE:
            out = self._trace_ids(lam_arr)
        else:
            # lam -> q - lam reverses the order of states
            out = 1.0 - self._trace_ids(self.coupling.q - lam_arr)
        return float(out) if lam_arr.ndim == 0 else out

    def band_of(self, lam: float) -> int | None:
        """Index (trace order) of the band containing ``lam``, if any."""
        t = lam if self.convention == TRACE else self.coupling.q - lam
        j = int(np.searchsorted(self.subbands[:, 0], t, side="right")) - 1
        if j >= 0 and t <= self.subbands[j, 1]:
            return j
        return None

    def inverse(self, u) -> np.ndarray:
        """Energies with ids(E) = u, by bisection inside the selected band."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if np.any((u < 0) | (u > 1)):
            raise ValueError("ids values lie in [0, 1]")
        ut = u if self.convention == TRACE else 1.0 - u
        j = np.minimum((ut * self.n_bands).astype(int), self.n_bands - 1)
        lo = self.subbands[j, 0].copy()
        hi = self.subbands[j, 1].copy()
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = self._trace_ids(mid) < ut
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        e = 0.5 * (lo + hi)
        return e if self.convention == TRACE else self.coupling.q - e


def ids(k: int, c: Coupling, tol: float = DEFAULT_TOL, convention: str = TRACE) -> IdsFunction:
    if convention not in (TRACE, OPERATOR):
        raise ValueError(f"unknown convention {convention!r}")
    lvl = bands(k, c, tol)
    return IdsFunction(k, c, lvl.subbands, lvl.orientation, convention)


def dos_weight(interval: tuple[float, float], k: int, c: Coupling,
               ids_fn: IdsFunction | None = None) -> float:
    """d N mass of [a, b]."""
    a, b = interval
    if a > b:
        raise ValueError("interval must satisfy left <= right")
    f = ids(k, c) if ids_fn is None else ids_fn
    return float(f(b) - f(a))


def default_pointwise_range(E: float, f: IdsFunction) -> tuple[float, float]:
    """Scales above the containing band (where N is smooth) up to 1/64 of the hull."""
    j = f.band_of(E)
    if j is None:
        raise ValueError(f"E = {E!r} is outside the level-{f.k} cover")
    width = f.subbands[j, 1] - f.subbands[j, 0]
    hull = f.subbands[-1, 1] - f.subbands[0, 0]
    return BAND_FACTOR * width, COARSEST_SCALE * hull


def pointwise_dimension(E: float, c: Coupling, k: int,
                        eps_range: tuple[float, float] | None = None,
                        n_scales: int = 12, ids_fn: IdsFunction | None = None) -> DimensionEstimate:
    """Slope of log N(E - eps, E + eps) against log eps."""
    if n_scales < 5:
        raise ValueError("n_scales must be >= 5")
    f = ids(k, c) if ids_fn is None else ids_fn
    if f.band_of(E) is None:
        raise ValueError(f"E = {E!r} is outside the level-{k} cover")
    lo, hi = default_pointwise_range(E, f) if eps_range is None else map(float, eps_range)
    if not (0 < lo < hi) or hi / lo < 2.0:
        raise ValueError(f"degenerate scaling range [{lo:g}, {hi:g}]")
    eps = np.geomspace(lo, hi, n_scales)
    mass = f(E + eps) - f(E - eps)
    if np.any(mass <= 0):
        raise ArithmeticError("zero mass inside the scaling range")
    fit = stats.linregress(np.log(eps), np.log(mass))
    r2 = float(fit.rvalue ** 2)
    slope = float(fit.slope)
    return DimensionEstimate(min(max(slope, 0.0), 1.0), float(fit.stderr), r2, (lo, hi),
                             n_scales, slope, float(fit.stderr), 0.0)


def sample_energies(f: IdsFunction, n: int, seed: int = 0) -> np.ndarray:
    """n energies distributed by dN."""
    rng = np.random.default_rng(seed)
    return np.sort(f.inverse(rng.uniform(0.0, 1.0, n)))


def dimension_gap_report(c: Coupling, k: int, n_points: int, seed: int = 0,
                         n_scales: int = 12, ids_fn: IdsFunction | None = None):
    """Rows (E, d, local_dim, gap, converged) at dN-sampled energies.

    The local dimension is taken over the window E +- (largest pointwise
    scale), the same neighbourhood the pointwise regression sees.
    """
    if n_points < 5:
        raise ValueError("n_points must be >= 5")
    f = ids(k, c) if ids_fn is None else ids_fn
    cover = spectral_cover(c, k)
    if f.convention == OPERATOR:
        cover = cover.mirror(c.q)
    rows = []
    for E in sample_energies(f, n_points, seed):
        d = pointwise_dimension(float(E), c, k, None, n_scales, f)
        half = d.scales[1]
        loc = local_dimension(c, (E - half, E + half), k, n_scales, cover=cover)
        ok = d.r_squared >= POINTWISE_R2 and loc.r_squared >= CONVERGED_R2
        rows.append((float(E), d, loc, loc.value - d.value, ok))
    return rows
