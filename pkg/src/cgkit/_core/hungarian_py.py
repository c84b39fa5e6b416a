"""Pure-Python minimum-cost assignment kernel.

Augmenting-path algorithm with row/column potentials, O(n^3) worst case.
Works with any totally ordered scalar supporting +, - (floats, Fractions,
ints); used both as the import fallback for the compiled kernel and as
the only path for exact rational costs.
"""

import math

__all__ = ["solve"]


def solve(cost_rows):
    """Return the row-to-column assignment minimizing the total cost.

    ``cost_rows`` is a square matrix given as a sequence of n rows of
    length n.  Ties are resolved deterministically (first strictly
    better candidate wins), matching the compiled kernel.
    """
    n = len(cost_rows)
    if n == 0:
        return []
    inf = math.inf
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row occupying column j, 1-based
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = 0
            row = cost_rows[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[match[j] - 1] = j - 1
    if __debug__:
        _assert_dual_feasible(cost_rows, u, v, n)
    return assignment


def _assert_dual_feasible(cost_rows, u, v, n):
    # Reduced costs must stay nonnegative; exact scalars get no slack.
    scale = max((abs(cost_rows[i][j]) for i in range(n) for j in range(n)), default=0)
    slack = 1e-9 * (1 + scale) if isinstance(scale, float) else 0
    for i in range(n):
        row = cost_rows[i]
        ui = u[i + 1]
        for j in range(n):
            assert row[j] - ui - v[j + 1] >= -slack, "dual feasibility violated"
