"""Small named diagrams used as fixtures and CLI examples."""
from __future__ import annotations

from latres.diagram import Diagram
from latres.errors import PreconditionError


def chain(k: int) -> Diagram:
    if k < 1:
        raise PreconditionError(f"chain: length {k} must be at least 1")
    upper = tuple((x + 1,) if x + 1 < k else () for x in range(k))
    lower = tuple((x - 1,) if x > 0 else () for x in range(k))
    return Diagram(upper, lower)


def stacked_n7_tower(m: int) -> list[int]:
    """Ids of x(0) < ... < x(m) inside ``stacked_n7(m)``."""
    first = 1 + 2 * (m + 2)
    return list(range(first, first + m + 1))


def stacked_n7(m: int) -> Diagram:
    """The standalone (7 + 3m)-element stacked N7.

    Ids: 0 bottom, then the left column l(0..m+1), the right column r(0..m+1),
    the tower x(0..m) and finally the top.
    """
    if m < 0:
        raise PreconditionError(f"stacked_n7: height {m} must be nonnegative")
    left = list(range(1, m + 3))
    right = list(range(m + 3, 2 * m + 5))
    tower = stacked_n7_tower(m)
    top = 3 * m + 6
    n = 3 * m + 7

    upper: list[tuple[int, ...]] = [()] * n
    lower: list[tuple[int, ...]] = [()] * n
    upper[0] = (left[0], right[0])
    for i in range(m + 2):
        if i <= m:
            upper[left[i]] = (left[i + 1], tower[i])
            upper[right[i]] = (tower[i], right[i + 1])
        else:
            upper[left[i]] = (top,)
            upper[right[i]] = (top,)
        lower[left[i]] = (left[i - 1],) if i else (0,)
        lower[right[i]] = (right[i - 1],) if i else (0,)
    for i in range(m + 1):
        upper[tower[i]] = (tower[i + 1],) if i < m else (top,)
        if i == 0:
            lower[tower[i]] = (left[0], right[0])
        else:
            lower[tower[i]] = (left[i], tower[i - 1], right[i])
    lower[top] = (left[m + 1], tower[m], right[m + 1])
    return Diagram(tuple(upper), tuple(lower))


def s7() -> Diagram:
    """Ids: 0 bottom, 1 a_l, 2 b_l, 3 a_r, 4 b_r, 5 center u, 6 top."""
    return stacked_n7(0)


def pentagon() -> Diagram:
    # 0 < 1 < 2 < 4 on the left, 0 < 3 < 4 on the right
    upper = ((1, 3), (2,), (4,), (4,), ())
    lower = ((), (0,), (1,), (0,), (2, 3))
    return Diagram(upper, lower)


def diamond() -> Diagram:
    upper = ((1, 2, 3), (4,), (4,), (4,), ())
    lower = ((), (0,), (0,), (0,), (1, 2, 3))
    return Diagram(upper, lower)


def grid_id(n: int, i: int, j: int) -> int:
    return i * n + j


def grid(m: int, n: int) -> Diagram:
    """C_m x C_n with element (i, j) at id ``i * n + j``; the C_m factor runs up the left."""
    if m < 2 or n < 2:
        raise PreconditionError(f"grid: both factors need at least 2 elements, got {m} x {n}")
    upper: list[tuple[int, ...]] = []
    lower: list[tuple[int, ...]] = []
    for i in range(m):
        for j in range(n):
            ups = []
            if i + 1 < m:
                ups.append(grid_id(n, i + 1, j))
            if j + 1 < n:
                ups.append(grid_id(n, i, j + 1))
            downs = []
            if j > 0:
                downs.append(grid_id(n, i, j - 1))
            if i > 0:
                downs.append(grid_id(n, i - 1, j))
            upper.append(tuple(ups))
            lower.append(tuple(downs))
    return Diagram(tuple(upper), tuple(lower))
