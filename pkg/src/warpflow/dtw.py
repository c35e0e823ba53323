"""Dynamic time warping on 1-D sequences.

Classic symmetric recurrence with unit step weights and absolute-difference
local cost::

    D[0, 0] = |x0 - y0|
    D[i, j] = |xi - yj| + min(D[i-1, j], D[i, j-1], D[i-1, j-1])

Out-of-range predecessors and cells outside an optional Sakoe-Chiba band are
+inf.  The returned distance is the raw accumulated cost (no division by the
path length).

:func:`dtw_bruteforce` enumerates every warping path explicitly and is kept
deliberately naive; it exists to check the dynamic program.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np
from numba import njit

from ._validation import check_series
from .errors import InfeasibleBand, TooLarge

BRUTEFORCE_LIMIT = 8


@dataclass(frozen=True)
class BandConstraint:
    """Global window on admissible cells.

    ``kind="sakoe_chiba"`` admits only cells with ``|i - j| <= radius``.
    """

    kind: str = "none"
    radius: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "sakoe_chiba"):
            raise ValueError(f"unknown band kind {self.kind!r}")
        if self.radius < 0:
            raise ValueError("band radius must be non-negative")

    @classmethod
    def sakoe_chiba(cls, radius):
        return cls("sakoe_chiba", int(radius))

    def as_radius(self):
        """Radius understood by the kernels; -1 means unconstrained."""
        return -1 if self.kind == "none" else self.radius


BandLike = Union[None, int, BandConstraint]


def _coerce_band(band: BandLike) -> BandConstraint:
    if band is None:
        return BandConstraint()
    if isinstance(band, BandConstraint):
        return band
    return BandConstraint.sakoe_chiba(band)


def _prepare(x, y, band):
    x = check_series(x, name="x")
    y = check_series(y, name="y")
    band = _coerce_band(band)
    radius = band.as_radius()
    if radius >= 0 and radius < abs(x.size - y.size):
        raise InfeasibleBand(
            f"Sakoe-Chiba radius {radius} admits no path for lengths "
            f"{x.size} and {y.size}"
        )
    return x, y, radius


def local_distance(a: float, b: float) -> float:
    return abs(float(a) - float(b))


@njit(cache=True, nogil=True)
def _accumulate(x, y, radius):
    n = x.shape[0]
    m = y.shape[0]
    inf = np.inf
    D = np.full((n, m), inf)
    for i in range(n):
        lo = 0
        hi = m
        if radius >= 0:
            lo = max(0, i - radius)
            hi = min(m, i + radius + 1)
        for j in range(lo, hi):
            cost = abs(x[i] - y[j])
            if i == 0 and j == 0:
                D[i, j] = cost
                continue
            best = inf
            if i > 0 and j > 0:
                best = D[i - 1, j - 1]
            if i > 0 and D[i - 1, j] < best:
                best = D[i - 1, j]
            if j > 0 and D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = cost + best
    return D


@njit(cache=True, nogil=True)
def _distance_two_rows(x, y, radius):
    n = x.shape[0]
    m = y.shape[0]
    inf = np.inf
    prev = np.full(m, inf)
    cur = np.full(m, inf)
    for i in range(n):
        lo = 0
        hi = m
        if radius >= 0:
            lo = max(0, i - radius)
            hi = min(m, i + radius + 1)
        for j in range(m):
            cur[j] = inf
        for j in range(lo, hi):
            cost = abs(x[i] - y[j])
            if i == 0 and j == 0:
                cur[j] = cost
                continue
            # same predecessor order as _accumulate so both agree bit for bit
            best = inf
            if i > 0 and j > 0:
                best = prev[j - 1]
            if i > 0 and prev[j] < best:
                best = prev[j]
            if j > 0 and cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = cost + best
        prev, cur = cur, prev
    return prev[m - 1]


def cost_matrix(x, y, band: BandLike = None) -> np.ndarray:
    """Full ``(n, m)`` accumulated-cost matrix (+inf outside the band)."""
    x, y, radius = _prepare(x, y, band)
    return _accumulate(x, y, radius)


def dtw_distance(x, y, band: BandLike = None) -> float:
    """DTW distance between ``x`` and ``y``.

    Parameters
    ----------
    x, y : array-like of float
        Non-empty 1-D sequences; lengths may differ.
    band : None, int or BandConstraint
        ``None`` for an unconstrained alignment, an int for a Sakoe-Chiba
        radius.

    Raises
    ------
    EmptySeries
        If either input is empty.
    InfeasibleBand
        If the band radius is smaller than the length difference.
    """
    x, y, radius = _prepare(x, y, band)
    return float(_distance_two_rows(x, y, radius))


def _backtrack(D) -> List[Tuple[int, int]]:
    i, j = D.shape[0] - 1, D.shape[1] - 1
    path = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            # diagonal wins ties, then vertical, then horizontal
            step = (i - 1, j - 1)
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                step, best = (i - 1, j), D[i - 1, j]
            if D[i, j - 1] < best:
                step = (i, j - 1)
            i, j = step
        path.append((i, j))
    path.reverse()
    return path


def warp_path(x, y, band: BandLike = None) -> List[Tuple[int, int]]:
    """Optimal warping path as 0-based ``(i, j)`` pairs from ``(0, 0)`` to ``(n-1, m-1)``."""
    return _backtrack(cost_matrix(x, y, band))


def path_cost(x, y, path) -> float:
    x = check_series(x, name="x")
    y = check_series(y, name="y")
    return float(sum(abs(x[i] - y[j]) for i, j in path))


@lru_cache(maxsize=None)
def _all_paths(n: int, m: int):
    paths = []

    def walk(i, j, acc):
        if i == n - 1 and j == m - 1:
            paths.append(tuple(acc))
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                acc.append((a, b))
                walk(a, b, acc)
                acc.pop()

    walk(0, 0, [(0, 0)])
    # flatten cell indices, padding short paths with a sentinel slot holding 0
    width = n + m - 1
    sentinel = n * m
    flat = np.full((len(paths), width), sentinel, dtype=np.intp)
    for k, p in enumerate(paths):
        flat[k, : len(p)] = [i * m + j for i, j in p]
    return paths, flat


def enumerate_paths(n: int, m: int) -> List[Tuple[Tuple[int, int], ...]]:
    """All monotone, continuous paths from ``(0, 0)`` to ``(n-1, m-1)``."""
    return list(_all_paths(n, m)[0])


def dtw_bruteforce(x, y) -> float:
    """Minimum summed cost over every warping path, by exhaustive enumeration.

    Only for tiny inputs (both lengths at most ``BRUTEFORCE_LIMIT``).
    """
    x = check_series(x, name="x")
    y = check_series(y, name="y")
    if x.size > BRUTEFORCE_LIMIT or y.size > BRUTEFORCE_LIMIT:
        raise TooLarge(
            f"brute force is limited to lengths <= {BRUTEFORCE_LIMIT}, "
            f"got {x.size} and {y.size}"
        )
    _, flat = _all_paths(x.size, y.size)
    cells = np.append(np.abs(x[:, None] - y[None, :]).ravel(), 0.0)
    return float(cells[flat].sum(axis=1).min())


class DTW:
    """Callable wrapper holding a band setting, handy as a metric argument."""

    def __init__(self, band: Optional[BandLike] = None):
        self.band = _coerce_band(band)

    def __call__(self, x, y):
        return dtw_distance(x, y, self.band)

    def path(self, x, y):
        return warp_path(x, y, self.band)

    def __repr__(self):
        return f"DTW(band={self.band!r})"
