import numpy as np
import pytest

from fibspec.fibword import fib_word, fibonacci
from fibspec.intervals import IntervalSet
from fibspec.jacobi import OPERATOR, TRACE, Coupling, band_edges_oracle
from fibspec.spectrum import (
    approx_spectrum,
    approx_spectrum_levels,
    bands,
    bounded_seeds,
    dirichlet_eigenvalues,
    escape_mask,
    escape_spectrum,
    measure_scan,
    operator_bands,
    search_bounds,
    trace_bounded_set,
    trace_poly_eval,
)
from fibspec.tracemap import default_bound
from fibspec.transfer import half_trace


def test_trace_poly_examples():
    assert trace_poly_eval(2, 0.0, Coupling(2, 0)) == pytest.approx(-5 / 4)
    assert trace_poly_eval(1, 0.9, Coupling(3, 0.4)) == pytest.approx(0.25)
    val, flag = trace_poly_eval(40, 50.0, Coupling(2, 1), with_flag=True)
    assert flag and abs(val) == 1e150


def test_trace_poly_matches_cocycle(coupling, rng):
    lams = rng.uniform(-3, 3, 20)
    for k in range(2, 13):
        ref = half_trace(fib_word(k), lams, coupling, TRACE)
        got = trace_poly_eval(k, lams, coupling)
        assert np.allclose(got, ref, rtol=1e-9, atol=1e-9)


def test_search_bounds():
    assert search_bounds(Coupling(1, 0)) == (-2, 2)
    assert search_bounds(Coupling(2, 1)) == (-5, 5)
    for c in (Coupling(2, 1), Coupling(0.5, -1), Coupling(1, 2)):
        lo, hi = search_bounds(c)
        for k in range(2, 9):
            ev = band_edges_oracle(k, c).array
            assert ev.min() >= lo - 1e-12 and ev.max() <= hi + 1e-12


def test_band_examples():
    b = bands(2, Coupling(2, 0), tol=1e-10).bands
    assert b.isclose(IntervalSet([[-3, -1], [1, 3]]), 1e-9)
    assert bands(3, Coupling(1, 0)).bands.isclose(IntervalSet([[-2, 2]]), 1e-9)
    lvl = bands(6, Coupling(1, 2))
    assert lvl.band_count == 13
    assert lvl.bands.isclose(band_edges_oracle(6, Coupling(1, 2), convention=TRACE), 1e-8)
    with pytest.raises(ValueError):
        bands(1, Coupling(1, 1))
    with pytest.raises(ValueError):
        bands(5, Coupling(1, 1), tol=0)


@pytest.mark.parametrize("k", range(2, 9))
def test_oracle_equivalence(k, coupling):
    b = bands(k, coupling).bands
    o = band_edges_oracle(k, coupling, convention=TRACE)
    assert len(b) == len(o)
    assert np.max(np.abs(b.array - o.array)) <= 1e-8


def test_operator_mirror(coupling):
    for k in (3, 5, 7):
        o = band_edges_oracle(k, coupling, convention=OPERATOR)
        assert operator_bands(k, coupling).isclose(o, 1e-8)


@pytest.mark.parametrize("k", range(2, 11))
def test_free_case_measure(k):
    lvl = bands(k, Coupling(1, 0))
    assert abs(lvl.bands.measure - 4) <= 1e-6
    assert lvl.touchings == fibonacci(k) - 1


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
def test_off_diagonal_symmetry(p):
    for k in (5, 8, 11):
        b = bands(k, Coupling(p, 0)).bands
        assert b.isclose(b.mirror(0.0), 1e-9)


@pytest.mark.parametrize("c", [Coupling(1, 1), Coupling(2, 1), Coupling(0.5, -1), Coupling(1.05, 0.05)])
def test_deep_levels_complete(c):
    for k in (14, 17):
        lvl = bands(k, c)
        fk = fibonacci(k)
        assert len(lvl.subbands) == fk
        assert lvl.band_count + lvl.touchings == fk
        mu = dirichlet_eigenvalues(k, c)
        # one Dirichlet value in each closed gap
        assert np.all(mu >= lvl.subbands[:-1, 1] - 1e-9)
        assert np.all(mu <= lvl.subbands[1:, 0] + 1e-9)


def test_discriminant_monotone_in_bands():
    c = Coupling(2, 1)
    lvl = bands(9, c, sample_discriminant=True)
    for l, r in lvl.subbands:
        xs = trace_poly_eval(9, np.linspace(l, r, 50), c)
        d = np.diff(xs)
        assert np.all(d > 0) or np.all(d < 0)
    assert lvl.discriminant_samples.shape[1] == 2
    assert np.all(np.abs(trace_poly_eval(9, lvl.subbands.ravel(), c)) <= 1 + 1e-6)


def test_trace_bounded_examples():
    c = Coupling(1.5, 0.3)
    C = 2.5
    s1 = trace_bounded_set(1, c, C)
    assert s1.isclose(IntervalSet([[0.3 - 2 * C, 0.3 + 2 * C]]), 1e-9)
    for k in (3, 6, 9):
        assert bands(k, c).bands.subset(trace_bounded_set(k, c, C), slack=1e-9)
    with pytest.raises(ValueError):
        trace_bounded_set(4, c, 0.5)


@pytest.mark.parametrize("c", [Coupling(1, 1), Coupling(2, 1), Coupling(0.5, -1)])
def test_trace_bounded_matches_grid(c):
    for k in (4, 7, 10):
        for C in (1.0, 1.7, default_bound(c)):
            s = trace_bounded_set(k, c, C)
            lo, hi = s.hull
            g = np.linspace(lo - 0.5, hi + 0.5, 40001)
            inside = np.abs(trace_poly_eval(k, g, c)) <= C
            assert np.array_equal(inside, s.contains(g, slack=1e-9))


@pytest.mark.parametrize("c", [Coupling(1, 1), Coupling(2, 1), Coupling(1, 2)])
def test_nesting(c):
    levels = approx_spectrum_levels(14, c)
    for k in range(0, 14):
        assert levels[k + 1].subset(levels[k], slack=1e-9)
        assert levels[k].isclose(approx_spectrum(k, c), 1e-12)


def test_free_cover_is_interval():
    for k in (3, 6, 9):
        assert approx_spectrum(k, Coupling(1, 0), bound_C=1.0).isclose(IntervalSet([[-2, 2]]), 1e-8)


def test_measure_decreasing():
    rows = measure_scan(Coupling(1, 1), 4, 16)
    m = [r[2] for r in rows]
    assert all(b < a for a, b in zip(m, m[1:]))
    assert [r[0] for r in rows] == list(range(4, 17))


def test_escape_free():
    s = escape_spectrum(Coupling(1, 0), depth=30, resolution=1e-4)
    assert len(s) == 1
    assert abs(s.lefts[0] + 2) <= 1e-4 and abs(s.rights[0] - 2) <= 1e-4


def _excess(cover, exact):
    """Largest distance from a point of ``cover`` to ``exact``."""
    g = np.concatenate([np.linspace(l, r, 200) for l, r in cover.array])
    e = exact.array
    inside = exact.contains(g)
    d = np.min(np.abs(g[:, None, None] - e[None]), axis=(1, 2))
    return float(np.max(np.where(inside, 0.0, d)))


@pytest.mark.parametrize("c", [Coupling(1, 2), Coupling(2, 1)])
def test_escape_cover_matches_levels(c):
    # "not escaped by level d" is exactly approx_spectrum(d - 1); the certified
    # cover contains it and converges to it as the cells shrink
    for d in (7, 12):
        exact = approx_spectrum(d - 1, c)
        excess = []
        for res in (1e-3, 1e-4, 1e-5):
            cover = escape_spectrum(c, depth=d, resolution=res)
            assert exact.subset(cover, slack=1e-12)
            excess.append(cover.measure - exact.measure)
        assert excess[0] >= excess[1] >= excess[2] >= 0
        assert excess[2] < 2e-3
        assert _excess(cover, exact) <= 10 * 1e-5
    edges = band_edges_oracle(6, c, convention=TRACE).array.ravel()
    assert np.all(escape_spectrum(c, depth=7, resolution=1e-4).contains(edges))


def test_escape_depth_monotone():
    c = Coupling(1, 2)
    deep = escape_spectrum(c, depth=30, resolution=1e-4)
    shallow = escape_spectrum(c, depth=20, resolution=1e-4)
    assert deep.subset(shallow)


def test_bounded_seeds(rng):
    c = Coupling(2, 1)
    seeds = bounded_seeds(c, 20, rng)
    assert len(seeds) == 20
    assert not escape_mask(seeds, c, 40).any()
