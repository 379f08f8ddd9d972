"""Finite unions of closed real intervals."""
from __future__ import annotations

from typing import Iterable

import numpy as np

DEFAULT_MERGE_TOL = 1e-9


def _as_pairs(intervals) -> np.ndarray:
    arr = np.asarray(intervals if not isinstance(intervals, IntervalSet)
                     else intervals.array, dtype=float)
    if arr.size == 0:
        return np.empty((0, 2))
    arr = arr.reshape(-1, 2)
    if np.isnan(arr).any():
        raise ValueError("interval endpoints must not be NaN")
    if (arr[:, 1] < arr[:, 0]).any():
        raise ValueError("interval with right < left")
    return arr


def _normalize(arr: np.ndarray, merge_tol: float) -> np.ndarray:
    if len(arr) <= 1:
        return arr.copy()
    arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
    # running max of right ends; a new component starts where the gap exceeds tol
    run_right = np.maximum.accumulate(arr[:, 1])
    starts = np.ones(len(arr), dtype=bool)
    starts[1:] = arr[1:, 0] - run_right[:-1] > merge_tol
    idx = np.flatnonzero(starts)
    ends = np.r_[idx[1:] - 1, len(arr) - 1]
    return np.column_stack([arr[idx, 0], run_right[ends]])


class IntervalSet:
    """Sorted, pairwise-disjoint closed intervals.

    Gaps no wider than ``merge_tol`` are fused on construction.
    """

    __slots__ = ("array", "merge_tol")

    def __init__(self, intervals: Iterable = (), merge_tol: float = DEFAULT_MERGE_TOL):
        self.merge_tol = float(merge_tol)
        self.array = _normalize(_as_pairs(intervals), self.merge_tol)
        self.array.setflags(write=False)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    # -- basic views -------------------------------------------------------
    @property
    def lefts(self) -> np.ndarray:
        return self.array[:, 0]

    @property
    def rights(self) -> np.ndarray:
        return self.array[:, 1]

    @property
    def lengths(self) -> np.ndarray:
        return self.array[:, 1] - self.array[:, 0]

    def __len__(self) -> int:
        return len(self.array)

    def __iter__(self):
        return (tuple(row) for row in self.array.tolist())

    def __bool__(self) -> bool:
        return len(self.array) > 0

    def __repr__(self) -> str:
        if len(self) > 6:
            head = ", ".join(f"[{l:.6g}, {r:.6g}]" for l, r in list(self)[:3])
            return f"IntervalSet({head}, ... {len(self)} intervals)"
        return "IntervalSet(" + ", ".join(f"[{l:.6g}, {r:.6g}]" for l, r in self) + ")"

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.array.shape == other.array.shape and bool(np.all(self.array == other.array))

    def isclose(self, other: "IntervalSet", atol: float) -> bool:
        """Same number of intervals with every edge within ``atol``."""
        return (self.array.shape == other.array.shape
                and bool(np.all(np.abs(self.array - other.array) <= atol)))

    @property
    def measure(self) -> float:
        return float(self.lengths.sum())

    @property
    def hull(self) -> tuple[float, float]:
        if not self:
            raise ValueError("hull of empty set")
        return float(self.array[0, 0]), float(self.array[-1, 1])

    @property
    def diameter(self) -> float:
        lo, hi = self.hull
        return hi - lo

    # -- algebra -----------------------------------------------------------
    def union(self, other: "IntervalSet") -> "IntervalSet":
        tol = min(self.merge_tol, other.merge_tol)
        return IntervalSet(np.vstack([self.array, other.array]), merge_tol=tol)

    __or__ = union

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        a, b = self.array, other.array
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i, 0], b[j, 0])
            hi = min(a[i, 1], b[j, 1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i, 1] < b[j, 1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out, merge_tol=min(self.merge_tol, other.merge_tol))

    __and__ = intersect

    def clip(self, lo: float, hi: float) -> "IntervalSet":
        return self.intersect(IntervalSet([(lo, hi)]))

    def contains(self, x, slack: float = 0.0):
        """Pointwise membership, with each interval widened by ``slack``."""
        x = np.asarray(x, dtype=float)
        if not self:
            return np.zeros(x.shape, dtype=bool) if x.ndim else False
        i = np.searchsorted(self.array[:, 0] - slack, x, side="right") - 1
        ok = i >= 0
        ic = np.clip(i, 0, len(self) - 1)
        res = ok & (x <= self.array[ic, 1] + slack)
        return bool(res) if res.ndim == 0 else res

    def subset(self, other: "IntervalSet", slack: float = 0.0) -> bool:
        """True if every interval of self lies inside one interval of ``other``
        widened by ``slack``."""
        if not self:
            return True
        if not other:
            return False
        wl = other.array[:, 0] - slack
        wr = other.array[:, 1] + slack
        i = np.searchsorted(wl, self.array[:, 0], side="right") - 1
        if (i < 0).any():
            return False
        return bool(np.all(self.array[:, 1] <= wr[i]))

    def mirror(self, center2: float) -> "IntervalSet":
        """Image under x -> center2 - x."""
        return IntervalSet(center2 - self.array[::-1, ::-1], merge_tol=self.merge_tol)

    def widen(self, pad: float) -> "IntervalSet":
        return IntervalSet(self.array + np.array([-pad, pad]), merge_tol=self.merge_tol)

    def gaps(self) -> "IntervalSet":
        """Bounded gaps between consecutive intervals."""
        if len(self) < 2:
            return IntervalSet.empty()
        return IntervalSet(np.column_stack([self.array[:-1, 1], self.array[1:, 0]]), merge_tol=0.0)

    def to_list(self) -> list[list[float]]:
        return self.array.tolist()


def measure(s: IntervalSet) -> float:
    return s.measure


def union(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    return s.union(t)


def intersect(s: IntervalSet, t: IntervalSet) -> IntervalSet:
    return s.intersect(t)


def subset(s: IntervalSet, t: IntervalSet, slack: float = 0.0) -> bool:
    return s.subset(t, slack)
