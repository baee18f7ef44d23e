"""NumPy implementations of the four simplex-projection algorithms.

All four compute the Euclidean projection onto ``{x >= 0, sum(x) = 1}`` by
locating the threshold ``tau`` with ``x = max(y - tau, 0)``; they differ in
how the active set is found.

- ``sort_project``: full descending sort, then one scan (Held et al. 1974
  lineage; Fig. 1 of Duchi et al. 2008).
- ``pivot_project``: pivot-and-partition over index sets, the soft-projection
  scheme of Shalev-Shwartz and Singer 2006.
- ``duchi_project``: Algorithm 2 (Fig. 2) of Duchi et al. 2008, transcribed
  from the published pseudocode.
- ``condat_project``: Algorithm 1 of Condat 2016 ("Fast projection onto the
  simplex and the l1 ball"), the online scan with a waiting list.

Pivots are the first element of the current working set instead of a random
draw, so runs are deterministic.  The pivot methods keep index order through
every partition, which fixes the pivot sequence and hence the float result.
"""

from __future__ import annotations

import numpy as np

__all__ = ["sort_project", "pivot_project", "duchi_project", "condat_project"]


def sort_project(y: np.ndarray) -> np.ndarray:
    u = np.sort(y)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, u.shape[0] + 1)
    # largest prefix whose running mean still leaves u_j above the threshold
    rho = np.nonzero(u - (css - 1.0) / j > 0.0)[0][-1]
    tau = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(y - tau, 0.0)


def pivot_project(y: np.ndarray) -> np.ndarray:
    n = y.shape[0]
    idx = np.arange(n)
    s = 0.0
    rho = 0
    while idx.size > 0:
        k = idx[0]
        vk = y[k]
        ge = y[idx] >= vk
        grown = idx[ge]
        lower = idx[~ge]
        others = grown[grown != k]
        ds = vk + float(np.sum(y[others]))
        drho = others.size + 1
        if s + ds - (rho + drho) * vk < 1.0:
            s += ds
            rho += drho
            idx = lower
        else:
            idx = others
    tau = (s - 1.0) / rho
    return np.maximum(y - tau, 0.0)


def duchi_project(y: np.ndarray) -> np.ndarray:
    idx = np.arange(y.shape[0])
    s = 0.0
    rho = 0
    while idx.size > 0:
        k = idx[0]
        vk = y[k]
        ge = y[idx] >= vk
        grown = idx[ge]
        lower = idx[~ge]
        ds = float(np.sum(y[grown]))
        drho = grown.size
        if s + ds - (rho + drho) * vk < 1.0:
            s += ds
            rho += drho
            idx = lower
        else:
            idx = grown[grown != k]
    tau = (s - 1.0) / rho
    return np.maximum(y - tau, 0.0)


def condat_project(y: np.ndarray) -> np.ndarray:
    yl = y.tolist()
    n = len(yl)
    v = [yl[0]]
    waiting: list = []
    rho = yl[0] - 1.0
    for k in range(1, n):
        yk = yl[k]
        if yk > rho:
            rho += (yk - rho) / (len(v) + 1)
            if rho > yk - 1.0:
                v.append(yk)
            else:
                # running mean fell too far: stash v and restart from yk
                waiting.extend(v)
                v = [yk]
                rho = yk - 1.0
    for w in waiting:
        if w > rho:
            v.append(w)
            rho += (w - rho) / len(v)
    # final filter: drop entries at or below the threshold until stable
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(v):
            w = v[i]
            if w <= rho:
                v[i] = v[-1]
                v.pop()
                rho += (rho - w) / len(v)
                changed = True
            else:
                i += 1
    return np.maximum(y - rho, 0.0)
