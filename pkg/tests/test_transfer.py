import numpy as np
import pytest

from fibspec.fibword import fib_word
from fibspec.jacobi import OPERATOR, TRACE, Coupling, band_edges_oracle
from fibspec.transfer import (
    cocycle_product,
    fundamental_discriminant,
    half_trace,
    log_abs_half_trace,
    site_matrix,
)


def test_site_matrices():
    lam = 0.37
    assert np.allclose(site_matrix("a", lam, Coupling(3, 2)), [[lam, -1], [1, 0]])
    assert np.allclose(site_matrix("b", lam, Coupling(2, 1)), 0.5 * np.array([[lam - 1, -1], [4, 0]]))
    assert np.linalg.det(site_matrix("b", 3.7, Coupling(2, 1))) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("p,q", [(1, 0), (2, 1), (0.5, -1), (-1.3, 0.4)])
def test_two_letter_product(p, q):
    c = Coupling(p, q)
    for lam in (-1.1, 0.0, 0.8, 2.5):
        ref = np.array([[(lam - q) * lam - 1, -(lam - q)], [p * p * lam, -p * p]]) / p
        assert np.allclose(cocycle_product("ab", lam, c), ref, rtol=1e-13, atol=1e-13)
    assert np.allclose(cocycle_product("a", 0.8, Coupling(1, 0)), [[0.8, -1], [1, 0]])


def test_unimodular(rng):
    c = Coupling(1.7, -0.6)
    for lam in rng.uniform(-2, 2, 10):
        m = cocycle_product(fib_word(6), lam, c)
        assert np.linalg.det(m) == pytest.approx(1.0, rel=1e-12)


def test_half_trace_values():
    assert half_trace("ab", 0.0, Coupling(2, 0)) == pytest.approx(-5 / 4)
    assert half_trace("a", 2.0, Coupling(1, 0)) == pytest.approx(1.0)
    w4 = fib_word(4)
    inside = abs(half_trace(w4, 0.0, Coupling(1, 0))) <= 1
    assert inside == bool(band_edges_oracle(4, Coupling(1, 0)).contains(0.0))


def test_vectorized_matches_loop(rng):
    c = Coupling(2, 1)
    lams = rng.uniform(-3, 3, 25)
    w = fib_word(9)
    ref = [0.5 * np.trace(cocycle_product(w, lam, c)) for lam in lams]
    assert np.allclose(half_trace(w, lams, c), ref, rtol=1e-10)


def test_rescaling_far_outside():
    c = Coupling(2, 1)
    w = fib_word(20)
    val = half_trace(w, 40.0, c)
    assert np.isfinite(val) or np.isinf(val)
    assert log_abs_half_trace(w, 40.0, c) > 1000


@pytest.mark.parametrize("conv", [OPERATOR, TRACE])
def test_fundamental_solutions(conv, coupling, rng):
    for k in range(2, 7):
        w = fib_word(k)
        for lam in rng.uniform(-3, 3, 5):
            assert fundamental_discriminant(w, lam, coupling, conv) == pytest.approx(
                half_trace(w, lam, coupling, conv), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("k", range(2, 9))
def test_floquet_consistency(k, coupling):
    # {|x_k| <= 1} equals the oracle band union: edges have |x_k| = 1, interiors < 1
    b = band_edges_oracle(k, coupling, convention=OPERATOR)
    w = fib_word(k)
    edges = b.array.ravel()
    assert np.allclose(np.abs(half_trace(w, edges, coupling)), 1.0, atol=1e-7)
    mids = 0.5 * (b.lefts + b.rights)
    # a merged band's midpoint can sit on a closed gap, where |x_k| = 1
    assert np.all(np.abs(half_trace(w, mids, coupling)) <= 1.0 + 1e-12)
    gaps = b.gaps()
    if gaps:
        gm = 0.5 * (gaps.lefts + gaps.rights)
        assert np.all(np.abs(half_trace(w, gm, coupling)) > 1.0)
