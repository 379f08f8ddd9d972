import numpy as np
import pytest

from fibspec.dos import dimension_gap_report, dos_weight, ids, pointwise_dimension, sample_energies
from fibspec.fibword import fib_word, fibonacci
from fibspec.jacobi import OPERATOR, TRACE, Coupling, cell_arrays, cell_matrix
from fibspec.spectrum import bands


def _ring_counting(k, c, convention, cells):
    """Normalized eigenvalue counting function of ``cells`` copies of the level-k cell on a ring."""
    hop, pot = cell_arrays(fib_word(k) * cells, c, convention)
    ev = np.linalg.eigvalsh(cell_matrix(hop, pot))
    return lambda e: np.searchsorted(ev, e, side="right") / len(ev)


def _gap_points(k, c):
    sub = bands(k, c).bands.array
    return 0.5 * (sub[:-1, 1] + sub[1:, 0])


def test_total_mass(coupling):
    f = ids(7, coupling)
    lo, hi = f.subbands[0, 0], f.subbands[-1, 1]
    assert f(lo - 1) == 0.0 and f(lo) == 0.0
    assert f(hi) == 1.0 and f(hi + 1) == 1.0
    assert np.all(np.diff(f(np.linspace(lo - 1, hi + 1, 5001))) >= 0)


def test_examples():
    assert dos_weight((1, 3), 2, Coupling(2, 0)) == pytest.approx(0.5)
    assert dos_weight((-1, 1), 2, Coupling(2, 0)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        dos_weight((1, 0), 2, Coupling(2, 0))


@pytest.mark.parametrize("k", [4, 5, 7, 9])
def test_half_filling_symmetric(k):
    # for odd F_k zero lies inside a band, where N is accurate to O(sqrt(tol))
    for p in (0.5, 2.0):
        assert ids(k, Coupling(p, 0))(0.0) == pytest.approx(0.5, abs=1e-5)


def test_gap_plateaus(coupling):
    k = 8
    f = ids(k, coupling)
    vals = f(_gap_points(k, coupling)) * fibonacci(k)
    assert np.allclose(vals, np.round(vals), atol=1e-9)
    sub = bands(k, coupling).bands.array
    for (a, b), v in zip(zip(sub[:-1, 1], sub[1:, 0]), vals):
        assert dos_weight((a + 1e-12, b - 1e-12), k, coupling, f) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
@pytest.mark.parametrize("convention", [TRACE, OPERATOR])
def test_counting_oracle(k, convention):
    for c in (Coupling(1, 1), Coupling(2, 1), Coupling(0.5, -1)):
        f = ids(k, c, convention=convention)
        count = _ring_counting(k, c, convention, 150)
        lo, hi = f.breakpoints[0], f.breakpoints[-1]
        grid = np.linspace(lo - 0.1, hi + 0.1, 801)
        assert np.max(np.abs(f(grid) - count(grid))) <= 0.02 / fibonacci(k) + 1e-2
        # every band carries 1/F_k, at the ring's resolution
        for left, right in f.breakpoints.reshape(-1, 2):
            mass = count(right + 1e-9) - count(left - 1e-9)
            assert abs(mass - 1 / fibonacci(k)) <= 0.02 / fibonacci(k) + 1 / (150 * fibonacci(k))


def test_operator_mirror():
    c = Coupling(2, 1)
    ft, fo = ids(7, c), ids(7, c, convention=OPERATOR)
    e = np.linspace(-4, 5, 301)
    assert np.allclose(fo(e), 1 - ft(c.q - e), atol=1e-12)


@pytest.mark.parametrize("c", [Coupling(1, 1), Coupling(2, 1)])
def test_level_consistency(c):
    k = 9
    coarse, fine = ids(k, c), ids(k + 3, c)
    pts = _gap_points(k, c)
    pts = pts[~bands(k + 3, c).bands.contains(pts)]
    assert len(pts) > 10
    assert np.max(np.abs(coarse(pts) - fine(pts))) <= 1e-3 + 1 / fibonacci(k)


def test_inverse_roundtrip(rng):
    for conv in (TRACE, OPERATOR):
        f = ids(8, Coupling(1, 1), convention=conv)
        u = rng.uniform(0, 1, 50)
        assert np.allclose(f(f.inverse(u)), u, atol=1e-9)
    with pytest.raises(ValueError):
        f.inverse(1.5)


def test_samples_in_spectrum():
    f = ids(8, Coupling(2, 1))
    e = sample_energies(f, 100, seed=3)
    assert np.all([f.band_of(x) is not None for x in e])
    assert np.array_equal(e, sample_energies(f, 100, seed=3))


def test_free_pointwise_dimension():
    c = Coupling(1, 0)
    for e in (-1.3, 0.3, 1.1):
        est = pointwise_dimension(e, c, 8, eps_range=(1e-4, 1e-2))
        assert abs(est.value - 1) <= 1e-3 and est.r_squared > 0.999


def test_pointwise_errors():
    c = Coupling(2, 1)
    with pytest.raises(ValueError):
        pointwise_dimension(50.0, c, 8)
    with pytest.raises(ValueError):
        pointwise_dimension(0.0, c, 8, n_scales=3)


def test_gap_report_rows():
    rows = dimension_gap_report(Coupling(1, 2), 12, 6, seed=1)
    assert len(rows) == 6
    for e, d, loc, gap, ok in rows:
        assert gap == pytest.approx(loc.value - d.value)
        assert 0 <= d.value <= 1 and isinstance(ok, bool)
    with pytest.raises(ValueError):
        dimension_gap_report(Coupling(1, 2), 12, 3)
