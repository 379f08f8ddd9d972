import pytest

from fibspec.fibword import K_MAX, fib_word, fibonacci, omega_s_window, substitute


def test_substitute_letters():
    assert substitute("a") == "ab"
    assert substitute("b") == "a"
    assert substitute("ab") == "aba"


@pytest.mark.parametrize("bad", ["", "abc", "A"])
def test_substitute_rejects(bad):
    with pytest.raises(ValueError):
        substitute(bad)


def test_fibonacci_values():
    assert [fibonacci(k) for k in range(8)] == [1, 1, 2, 3, 5, 8, 13, 21]
    with pytest.raises(ValueError):
        fibonacci(-1)


def test_fib_word_small():
    assert fib_word(2) == "ab"
    # S^2(a) and S^4(a) built with the substitution itself
    assert fib_word(3) == substitute(substitute("a"))
    w = "a"
    for _ in range(4):
        w = substitute(w)
    assert fib_word(5) == w == "abaababa"
    with pytest.raises(ValueError):
        fib_word(1)


def test_word_laws():
    for k in range(2, K_MAX - 1):
        w = fib_word(k)
        assert len(w) == fibonacci(k)
        if k <= 24:
            assert fib_word(k + 2) == fib_word(k + 1) + w
            assert substitute(w) == fib_word(k + 1)
            assert w.count("a") == fibonacci(k - 1)
            assert w.count("b") == fibonacci(k - 2)


def test_deep_level_cheap():
    assert len(fib_word(30)) == fibonacci(30) == 1346269


def test_omega_window():
    w1 = omega_s_window(1)
    assert (w1[-1], w1[0], w1[1]) == ("a", "b", "a")
    assert omega_s_window(2)[-2] == "a"
    assert omega_s_window(8).positive == fib_word(5)
    with pytest.raises(IndexError):
        w1[2]


def test_omega_window_relations():
    m = 200
    w = omega_s_window(m)
    u = fib_word(14)
    for k in range(1, m + 1):
        assert w[k] == u[k - 1]
    for k in range(2, m + 1):
        assert w[-k] == u[k - 2]
    assert w[0] == "b"
