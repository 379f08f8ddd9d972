"""Fibonacci substitution words.

Words are plain ``str`` objects over the letters ``"a"`` and ``"b"``; the
substitution is ``a -> ab``, ``b -> a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

ALPHABET = frozenset("ab")
K_MAX = 30

_SUBST = str.maketrans({"a": "ab", "b": "a"})


def _check_word(w: str) -> None:
    if not w:
        raise ValueError("empty input")
    if not set(w) <= ALPHABET:
        raise ValueError(f"letters outside {{a, b}}: {sorted(set(w) - ALPHABET)}")


def substitute(w: str) -> str:
    """Apply a -> ab, b -> a letterwise."""
    _check_word(w)
    return w.translate(_SUBST)


def fibonacci(k: int) -> int:
    """F_0 = F_1 = 1, F_k = F_{k-1} + F_{k-2}."""
    if k < 0:
        raise ValueError(f"fibonacci index must be >= 0, got {k}")
    a, b = 1, 1
    for _ in range(k):
        a, b = b, a + b
    return a


@lru_cache(maxsize=64)
def fib_word(k: int) -> str:
    """The prefix u_1...u_{F_k} = S^{k-1}(a) of the Fibonacci sequence."""
    if k < 2:
        raise ValueError(f"level must be >= 2, got {k}")
    prev, cur = "a", "ab"  # levels 1 and 2
    for _ in range(k - 2):
        prev, cur = cur, cur + prev
    return cur


@dataclass(frozen=True)
class TwoSidedWindow:
    """Letters of a two-sided sequence at positions -m..m."""

    m: int
    letters: str  # letters[i] sits at position i - m

    def __getitem__(self, n: int) -> str:
        if not -self.m <= n <= self.m:
            raise IndexError(f"position {n} outside window [-{self.m}, {self.m}]")
        return self.letters[n + self.m]

    @property
    def positive(self) -> str:
        """Letters at positions 1..m."""
        return self.letters[self.m + 1:]


def omega_s_window(m: int) -> TwoSidedWindow:
    """Window -m..m of the two-sided sequence obtained by iterating S^2 on b|a.

    Position 0 is the last letter left of the bar, position 1 the first
    letter right of it.
    """
    if m < 1:
        raise ValueError(f"window half-width must be >= 1, got {m}")
    left, right = "b", "a"
    while len(left) < m + 1 or len(right) < m:
        left = substitute(substitute(left))
        right = substitute(substitute(right))
    return TwoSidedWindow(m, left[len(left) - m - 1:] + right[:m])
