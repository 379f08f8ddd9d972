import math

import numpy as np
import pytest

from fibspec.fibword import fib_word, fibonacci
from fibspec.intervals import IntervalSet
from fibspec.jacobi import (
    OPERATOR,
    TRACE,
    Coupling,
    band_edges_oracle,
    eigenvalues_symmetric,
    floquet_bands,
    hopping,
    periodic_matrix,
    potential,
)


def test_coupling_validation():
    with pytest.raises(ValueError, match="p must be nonzero"):
        Coupling(0, 1)
    with pytest.raises(ValueError):
        Coupling(float("nan"), 0)
    assert Coupling(2, 1).z == pytest.approx(5 / 4)


def test_site_values():
    c = Coupling(2, 0.5)
    assert hopping("a", c) == 1
    assert hopping("b", c) == 2
    assert potential("b", c) == 0.5
    assert potential("a", c) == 0
    # trace convention moves the potential onto a
    assert c.site("a", TRACE) == (1.0, 0.5)
    assert c.site("b", TRACE) == (2.0, 0.0)


def test_free_small_cells():
    c = Coupling(1, 0)
    assert np.allclose(eigenvalues_symmetric(periodic_matrix(2, c, 1)), [-2, 2])
    assert np.allclose(eigenvalues_symmetric(periodic_matrix(3, c, 1)), [-1, -1, 2])
    ref = np.sort(2 * np.cos(2 * np.pi * np.arange(5) / 5))
    assert np.allclose(eigenvalues_symmetric(periodic_matrix(4, c, 1)), ref)


def _assemble(word, c, phase):
    # textbook assembly, bond n-1 -> n weighted by the hopping of site n
    n = len(word)
    m = np.zeros((n, n))
    for i, ch in enumerate(word):
        m[i, i] = c.potential(ch)
        j = (i - 1) % n
        w = c.hopping(ch) * (phase if i == 0 else 1)
        m[i, j] += w
        m[j, i] += w
    return m


@pytest.mark.parametrize("k", [3, 4, 5, 6])
@pytest.mark.parametrize("phase", [1, -1])
def test_matrix_assembly(k, phase):
    c = Coupling(2, 1)
    m = periodic_matrix(k, c, phase)
    assert np.array_equal(m, m.T)
    assert np.allclose(m, _assemble(fib_word(k), c, phase))
    if k == 3:
        assert np.allclose(np.diag(m), [0, 1, 0])
        assert m[0, 1] == 2  # bond into site 2 carries p(b)


def test_eigensolver():
    assert np.allclose(eigenvalues_symmetric(np.eye(3)), [1, 1, 1])
    assert np.allclose(eigenvalues_symmetric(np.diag([2.0, -1.0, 0.0])), [-1, 0, 2])
    with pytest.raises(ValueError):
        eigenvalues_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_oracle_examples():
    assert band_edges_oracle(2, Coupling(2, 0)).isclose(IntervalSet([[-3, -1], [1, 3]]), 1e-12)
    assert band_edges_oracle(2, Coupling(1, 0)).isclose(IntervalSet([[-2, 2]]), 1e-12)
    b = band_edges_oracle(5, Coupling(1, 2))
    assert len(b) == fibonacci(5) == 8


def test_oracle_conventions_mirror():
    c = Coupling(1.5, 0.7)
    for k in range(2, 8):
        op = band_edges_oracle(k, c, convention=OPERATOR)
        tr = band_edges_oracle(k, c, convention=TRACE)
        assert op.isclose(tr.mirror(c.q), 1e-10)


def test_oracle_size_cap():
    with pytest.raises(ValueError):
        band_edges_oracle(18, Coupling(1, 1))


def test_interlacing_guard():
    with pytest.raises(ArithmeticError, match="Floquet interlacing failed"):
        floquet_bands(np.array([0.0, 1.0]), np.array([2.0, 3.0]))
    with pytest.raises(ValueError):
        floquet_bands(np.array([0.0, 3.0]), np.array([1.0, 2.0, 5.0]))


@pytest.mark.parametrize("k", range(2, 10))
def test_symmetry_and_gershgorin(k, rng):
    p = float(rng.uniform(0.2, 3.0))
    # lam -> -lam is the gauge (-1)^n, which flips the closing bond when F_k is odd
    for phase in (1, -1):
        ev = eigenvalues_symmetric(periodic_matrix(k, Coupling(p, 0.0), phase))
        partner = phase if fibonacci(k) % 2 == 0 else -phase
        ev2 = eigenvalues_symmetric(periodic_matrix(k, Coupling(p, 0.0), partner))
        assert np.allclose(np.sort(-ev), ev2, atol=1e-10)
    assert band_edges_oracle(k, Coupling(p, 0.0)).isclose(band_edges_oracle(k, Coupling(p, 0.0)).mirror(0.0), 1e-10)
    c = Coupling(p, float(rng.uniform(-3, 3)))
    for phase in (1, -1):
        ev = eigenvalues_symmetric(periodic_matrix(k, c, phase))
        assert np.all(np.abs(ev) <= 2 * max(1, abs(c.p)) + abs(c.q) + 1e-12)


def test_free_band_closed_form():
    # free chain of period n: bands fill [-2, 2]
    for k in range(2, 9):
        assert band_edges_oracle(k, Coupling(1, 0)).isclose(IntervalSet([[-2, 2]]), 1e-9)
    assert math.isclose(band_edges_oracle(6, Coupling(1, 0)).measure, 4.0, abs_tol=1e-9)
