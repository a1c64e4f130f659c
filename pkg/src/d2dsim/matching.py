"""Maximum-weight bipartite matching (Hungarian algorithm, O(n^3)).

Used to pair CU channels with multicast groups when each channel hosts at
most one group. Rectangular problems are squared with zero-weight dummies:
groups matched to a dummy channel stay unassigned, channels matched to a
dummy group stay exclusive to their CU.
"""

from __future__ import annotations

import numpy as np


def hungarian_match(weights) -> tuple[list, float]:
    """Match rows (channels) to columns (groups) maximizing total weight.

    Returns (pairs, total) where pairs is a list of (row, col) covering every
    real row/col that was matched to a real partner. Raises on non-finite
    weights. Potentials-based shortest augmenting path formulation.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("weight matrix must be 2-D")
    if not np.all(np.isfinite(w)):
        raise ValueError("weight matrix must be finite")
    rows, cols = w.shape
    n = max(rows, cols)
    cost = np.zeros((n, n))
    cost[:rows, :cols] = -w  # minimize negated weight; dummies cost 0

    INF = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match_col = [0] * (n + 1)  # 1-based: match_col[j] = row matched to column j
    for i in range(1, n + 1):
        match_col[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        way = [0] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match_col[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match_col[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_col[j0] = match_col[j1]
            j0 = j1

    pairs = []
    total = 0.0
    for j in range(1, n + 1):
        i = match_col[j]
        if i - 1 < rows and j - 1 < cols:
            pairs.append((i - 1, j - 1))
            total += w[i - 1, j - 1]
    pairs.sort()
    return pairs, float(total)
