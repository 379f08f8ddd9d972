# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; semantics mirror ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, copysign, floor, ceil, log10, pow, isfinite, INFINITY

cnp.import_array()

cdef double SATURATE = 1e150
cdef double RESCALE = 1e100


cdef inline void _pair(double lam, double p, double q, long k,
                       double* xk, double* xk1, bint* sat) noexcept nogil:
    cdef double x = 0.5 * (lam - q)
    cdef double y = lam / (2.0 * p)
    cdef double z = (1.0 + p * p) / (2.0 * p)
    cdef double t
    cdef long i
    sat[0] = False
    if k == -1:
        xk[0] = z
        xk1[0] = y
        return
    for i in range(k):
        t = 2.0 * x * y - z
        z = y
        y = x
        x = t
        if fabs(x) > SATURATE:
            x = copysign(SATURATE, x)
            sat[0] = True
    xk[0] = y
    xk1[0] = x


def trace_pair(lams, double p, double q, long k):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lv = np.ascontiguousarray(lams, dtype=np.float64).ravel()
    cdef Py_ssize_t n = lv.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.empty(n)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] s = np.zeros(n, dtype=np.uint8)
    cdef bint flag
    with nogil:
        for i in range(n):
            _pair(lv[i], p, q, k, &a[i], &b[i], &flag)
            s[i] = flag
    shape = np.shape(lams)
    return a.reshape(shape), b.reshape(shape), s.astype(bool).reshape(shape)


def escape_index(lams, double p, double q, double bound, long maxlevel):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lv = np.ascontiguousarray(lams, dtype=np.float64).ravel()
    cdef Py_ssize_t n = lv.shape[0], i
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.full(n, -1, dtype=np.int64)
    cdef double x, y, z, t
    cdef long j
    with nogil:
        for i in range(n):
            x = 0.5 * (lv[i] - q)
            y = lv[i] / (2.0 * p)
            z = (1.0 + p * p) / (2.0 * p)
            if maxlevel >= 1 and fabs(x) > bound and fabs(y) > bound:
                out[i] = 1
                continue
            for j in range(2, maxlevel + 1):
                t = 2.0 * x * y - z
                z = y
                y = x
                x = t
                if fabs(x) > SATURATE:
                    x = copysign(SATURATE, x)
                if fabs(x) > bound and fabs(y) > bound:
                    out[i] = j
                    break
    return out.reshape(np.shape(lams))


cdef inline double _mag_lo(double lo, double hi) noexcept nogil:
    if lo <= 0.0 and hi >= 0.0:
        return 0.0
    return fabs(lo) if fabs(lo) < fabs(hi) else fabs(hi)


cdef inline double _clip(double v) noexcept nogil:
    if v > SATURATE:
        return SATURATE
    if v < -SATURATE:
        return -SATURATE
    return v


def interval_escaped(lo, hi, double p, double q, double bound, long depth):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lov = np.ascontiguousarray(lo, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hiv = np.ascontiguousarray(hi, dtype=np.float64).ravel()
    cdef Py_ssize_t n = lov.shape[0], i
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n, dtype=np.uint8)
    cdef double xl, xh, yl, yh, zl, zh, a, b, c0, c1, c2, c3, pl, ph, nl, nh
    cdef long j
    with nogil:
        for i in range(n):
            xl = 0.5 * (lov[i] - q)
            xh = 0.5 * (hiv[i] - q)
            a = lov[i] / (2.0 * p)
            b = hiv[i] / (2.0 * p)
            yl = a if a < b else b
            yh = b if a < b else a
            zl = (1.0 + p * p) / (2.0 * p)
            zh = zl
            if depth >= 1 and _mag_lo(xl, xh) > bound and _mag_lo(yl, yh) > bound:
                out[i] = 1
                continue
            for j in range(2, depth + 1):
                c0 = xl * yl
                c1 = xl * yh
                c2 = xh * yl
                c3 = xh * yh
                pl = c0
                ph = c0
                if c1 < pl: pl = c1
                if c1 > ph: ph = c1
                if c2 < pl: pl = c2
                if c2 > ph: ph = c2
                if c3 < pl: pl = c3
                if c3 > ph: ph = c3
                nl = 2.0 * pl - zh
                nh = 2.0 * ph - zl
                nl = nl - 1e-14 * fabs(nl)
                nh = nh + 1e-14 * fabs(nh)
                zl = yl
                zh = yh
                yl = xl
                yh = xh
                xl = nl
                xh = nh
                if isfinite(nl) and isfinite(nh) and _mag_lo(xl, xh) > bound and _mag_lo(yl, yh) > bound:
                    out[i] = 1
                    break
                xl = _clip(xl)
                xh = _clip(xh)
    return out.astype(bool).reshape(np.shape(lo))


def cocycle_half_trace(codes, lams, hop, pot):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] cv = np.ascontiguousarray(codes, dtype=np.uint8).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lv = np.ascontiguousarray(lams, dtype=np.float64).ravel()
    cdef double h0 = hop[0], h1 = hop[1], q0 = pot[0], q1 = pot[1]
    cdef Py_ssize_t n = lv.shape[0], L = cv.shape[0], i, s
    cdef cnp.ndarray[cnp.float64_t, ndim=1] val = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lg = np.empty(n)
    cdef double m11, m12, m21, m22, n11, n12, a, bb, d, pp, qq, sc, t, mx
    with nogil:
        for i in range(n):
            m11 = 1.0
            m12 = 0.0
            m21 = 0.0
            m22 = 1.0
            sc = 0.0
            for s in range(L):
                if cv[s] == 0:
                    pp = h0
                    qq = q0
                else:
                    pp = h1
                    qq = q1
                a = (lv[i] - qq) / pp
                bb = -1.0 / pp
                d = pp
                n11 = a * m11 + bb * m21
                n12 = a * m12 + bb * m22
                m21 = d * m11
                m22 = d * m12
                m11 = n11
                m12 = n12
                mx = fabs(m11)
                if fabs(m12) > mx: mx = fabs(m12)
                if fabs(m21) > mx: mx = fabs(m21)
                if fabs(m22) > mx: mx = fabs(m22)
                if mx > RESCALE:
                    m11 = m11 / RESCALE
                    m12 = m12 / RESCALE
                    m21 = m21 / RESCALE
                    m22 = m22 / RESCALE
                    sc = sc + 100.0
            t = 0.5 * (m11 + m22)
            if t == 0.0:
                lg[i] = -INFINITY
            else:
                lg[i] = log10(fabs(t)) + sc
            val[i] = t * pow(10.0, sc)
    shape = np.shape(lams)
    return val.reshape(shape), lg.reshape(shape)


def bisect_level(lo, hi, double p, double q, long k, double bound, double tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lov = np.array(lo, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hiv = np.array(hi, dtype=np.float64).ravel()
    cdef Py_ssize_t n = lov.shape[0], i
    cdef double a, b, m, v, w
    cdef bint sat, inl, inm
    cdef int it
    with nogil:
        for i in range(n):
            a = lov[i]
            b = hiv[i]
            _pair(a, p, q, k, &v, &w, &sat)
            inl = fabs(v) <= bound
            for it in range(200):
                if b - a <= tol:
                    break
                m = 0.5 * (a + b)
                _pair(m, p, q, k, &v, &w, &sat)
                inm = fabs(v) <= bound
                if inm == inl:
                    a = m
                else:
                    b = m
            lov[i] = a
            hiv[i] = b
    return lov.reshape(np.shape(lo)), hiv.reshape(np.shape(hi))


cdef double GRID_SLACK = 1e-9


def box_count(lefts, rights, double eps, double anchor=0.0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lv = np.ascontiguousarray(lefts, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rv = np.ascontiguousarray(rights, dtype=np.float64).ravel()
    cdef Py_ssize_t n = lv.shape[0], i
    cdef long long total = 0, jl, jr, prev = 0
    cdef bint first = True
    with nogil:
        for i in range(n):
            jl = <long long>floor((lv[i] - anchor) / eps + GRID_SLACK)
            jr = <long long>ceil((rv[i] - anchor) / eps - GRID_SLACK) - 1
            if jr < jl:
                jr = jl
            total += jr - jl + 1
            if not first and jl <= prev:
                total -= 1
            prev = jr
            first = False
    return int(total)
