"""Pure numpy implementations of the hot loops.

Semantics match ``_kernels.pyx`` exactly; the compiled module is preferred
when importable (see ``_backend``).
"""
from __future__ import annotations

import math

import numpy as np

SATURATE = 1e150
_LOG_RESCALE = 1e100
GRID_SLACK = 1e-9  # box_count: fraction of a cell treated as a boundary touch


def _gamma(lams, p, q):
    lams = np.asarray(lams, dtype=float)
    x = 0.5 * (lams - q)
    y = lams / (2.0 * p)
    z = np.full_like(lams, (1.0 + p * p) / (2.0 * p))
    return x, y, z


def trace_pair(lams, p, q, k):
    """Half-traces (x_k, x_{k+1}) on the orbit of the initial line, k >= -1.

    Values beyond ``SATURATE`` are clipped keeping their sign; the third
    output flags samples where that happened.
    """
    lams = np.ascontiguousarray(lams, dtype=float)
    x, y, z = _gamma(lams, p, q)
    sat = np.zeros(lams.shape, dtype=bool)
    if k == -1:
        return z, y, sat
    if k == 0:
        return y, x, sat
    for _ in range(k):
        x, y, z = 2.0 * x * y - z, x, y
        big = np.abs(x) > SATURATE
        if big.any():
            x = np.where(big, np.copysign(SATURATE, x), x)
            sat |= big
    return y, x, sat


def escape_index(lams, p, q, bound, maxlevel):
    """First level j with |x_{j-1}| > bound and |x_j| > bound, or -1."""
    lams = np.ascontiguousarray(lams, dtype=float)
    x, y, z = _gamma(lams, p, q)
    out = np.full(lams.shape, -1, dtype=np.int64)
    live = np.ones(lams.shape, dtype=bool)
    if maxlevel >= 1:
        fired = (np.abs(x) > bound) & (np.abs(y) > bound)
        out[fired] = 1
        live &= ~fired
    for j in range(2, maxlevel + 1):
        if not live.any():
            break
        x, y, z = 2.0 * x * y - z, x, y
        x = np.where(np.abs(x) > SATURATE, np.copysign(SATURATE, x), x)
        fired = live & (np.abs(x) > bound) & (np.abs(y) > bound)
        out[fired] = j
        live &= ~fired
    return out


def _imul(al, ah, bl, bh):
    c = np.stack([al * bl, al * bh, ah * bl, ah * bh])
    return c.min(axis=0), c.max(axis=0)


def _mag_lo(lo, hi):
    return np.where((lo <= 0.0) & (hi >= 0.0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))


def interval_escaped(lo, hi, p, q, bound, depth):
    """Certify, by interval arithmetic, that every point of [lo, hi] escapes
    by level ``depth``."""
    lo = np.ascontiguousarray(lo, dtype=float)
    hi = np.ascontiguousarray(hi, dtype=float)
    xl, xh = 0.5 * (lo - q), 0.5 * (hi - q)
    a, b = lo / (2.0 * p), hi / (2.0 * p)
    yl, yh = np.minimum(a, b), np.maximum(a, b)
    zc = (1.0 + p * p) / (2.0 * p)
    zl = np.full_like(lo, zc)
    zh = zl.copy()
    done = np.zeros(lo.shape, dtype=bool)
    if depth >= 1:
        done |= (_mag_lo(xl, xh) > bound) & (_mag_lo(yl, yh) > bound)
    with np.errstate(invalid="ignore", over="ignore"):
        for _ in range(2, depth + 1):
            if done.all():
                break
            pl, ph = _imul(xl, xh, yl, yh)
            nl = 2.0 * pl - zh
            nh = 2.0 * ph - zl
            nl = nl - 1e-14 * np.abs(nl)
            nh = nh + 1e-14 * np.abs(nh)
            zl, zh, yl, yh, xl, xh = yl, yh, xl, xh, nl, nh
            ok = np.isfinite(nl) & np.isfinite(nh)
            done |= ok & (_mag_lo(xl, xh) > bound) & (_mag_lo(yl, yh) > bound)
            # keep runaway intervals finite
            xl = np.clip(xl, -SATURATE, SATURATE)
            xh = np.clip(xh, -SATURATE, SATURATE)
    return done


def cocycle_half_trace(codes, lams, hop, pot):
    """Half-trace of T_n ... T_1 for a letter-code word (0 = a, 1 = b).

    Returns (value, log10 |value|); products are rescaled to avoid overflow,
    so ``value`` may be +-inf while the log stays finite.
    """
    codes = np.asarray(codes, dtype=np.uint8)
    lams = np.ascontiguousarray(lams, dtype=float)
    m11 = np.ones_like(lams)
    m12 = np.zeros_like(lams)
    m21 = np.zeros_like(lams)
    m22 = np.ones_like(lams)
    scale = np.zeros_like(lams)  # log10 of factored-out magnitude
    for c in codes:
        pp, qq = hop[c], pot[c]
        a = (lams - qq) / pp
        b = -1.0 / pp
        d = pp
        # [[a, b], [d, 0]] @ M
        m11, m12, m21, m22 = a * m11 + b * m21, a * m12 + b * m22, d * m11, d * m12
        big = np.maximum.reduce([np.abs(m11), np.abs(m12), np.abs(m21), np.abs(m22)]) > _LOG_RESCALE
        if big.any():
            f = np.where(big, 1.0 / _LOG_RESCALE, 1.0)
            m11, m12, m21, m22 = m11 * f, m12 * f, m21 * f, m22 * f
            scale += np.where(big, 100.0, 0.0)
    t = 0.5 * (m11 + m22)
    with np.errstate(divide="ignore", over="ignore"):
        logabs = np.log10(np.abs(t)) + scale
        value = t * np.power(10.0, scale)
    return value, logabs


def bisect_level(lo, hi, p, q, k, bound, tol):
    """Bisect h = |x_k| - bound on brackets with a sign change until width <= tol.

    The side of ``lo`` keeps its sign class throughout.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    hl = np.abs(trace_pair(lo, p, q, k)[0]) <= bound
    for _ in range(200):
        w = hi - lo
        act = w > tol
        if not act.any():
            break
        mid = 0.5 * (lo + hi)
        hm = np.abs(trace_pair(mid, p, q, k)[0]) <= bound
        same = hm == hl
        lo = np.where(act & same, mid, lo)
        hi = np.where(act & ~same, mid, hi)
    return lo, hi


def box_count(lefts, rights, eps, anchor=0.0):
    """Number of grid cells [anchor + j eps, anchor + (j+1) eps) whose interior
    meets the set; a single point occupies the cell it falls in.  Overlaps
    thinner than GRID_SLACK * eps are rounding noise and do not count."""
    lefts = np.asarray(lefts, dtype=float)
    rights = np.asarray(rights, dtype=float)
    if lefts.size == 0:
        return 0
    jl = np.floor((lefts - anchor) / eps + GRID_SLACK).astype(np.int64)
    jr = np.maximum(np.ceil((rights - anchor) / eps - GRID_SLACK).astype(np.int64) - 1, jl)
    total = int((jr - jl + 1).sum())
    # sorted disjoint input: consecutive intervals share at most one cell
    total -= int(np.count_nonzero(jl[1:] <= jr[:-1]))
    return total
