"""Numba-compiled inner loops for reduction and enumeration.

Everything here works on raw contiguous float64/int64 arrays; the public
modules own validation, error mapping and result wrapping. Keep these
kernels free of fastmath so results stay bit-reproducible.
"""

import numba
import numpy as np

TIE_TOL = 1e-12  # slack for "exactly equal" objective comparisons


@numba.njit(cache=True, inline="always")
def _round_ha(x):
    if x >= 0.0:
        return np.floor(x + 0.5)
    return -np.floor(-x + 0.5)


@numba.njit(cache=True)
def _gso_range(b, bstar, mu, bsq, lo):
    """Recompute modified Gram-Schmidt data for columns lo..n-1 in place."""
    m, n = b.shape
    for i in range(lo, n):
        for r in range(m):
            bstar[r, i] = b[r, i]
        for j in range(i):
            dot = 0.0
            for r in range(m):
                dot += bstar[r, i] * bstar[r, j]
            c = dot / bsq[j]
            mu[i, j] = c
            for r in range(m):
                bstar[r, i] -= c * bstar[r, j]
        acc = 0.0
        for r in range(m):
            acc += bstar[r, i] * bstar[r, i]
        bsq[i] = acc


@numba.njit(cache=True)
def _lll(b, u, delta, max_swaps):
    """In-place LLL reduction of b with unimodular tracking in u.

    Returns the swap count, or -1 if max_swaps was exceeded.
    """
    m, n = b.shape
    bstar = np.zeros((m, n))
    mu = np.zeros((n, n))
    bsq = np.zeros(n)
    _gso_range(b, bstar, mu, bsq, 0)
    swaps = 0
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = _round_ha(mu[k, j])
            if q != 0.0:
                qi = np.int64(q)
                for r in range(m):
                    b[r, k] -= q * b[r, j]
                for r in range(n):
                    u[r, k] -= qi * u[r, j]
                for jj in range(j):
                    mu[k, jj] -= q * mu[j, jj]
                mu[k, j] -= q
        lhs = bsq[k] + 1e-12 * bsq[k - 1]
        if lhs >= (delta - mu[k, k - 1] * mu[k, k - 1]) * bsq[k - 1]:
            k += 1
        else:
            swaps += 1
            if swaps > max_swaps:
                return -1
            for r in range(m):
                t = b[r, k]
                b[r, k] = b[r, k - 1]
                b[r, k - 1] = t
            for r in range(n):
                ti = u[r, k]
                u[r, k] = u[r, k - 1]
                u[r, k - 1] = ti
            _gso_range(b, bstar, mu, bsq, k - 1)
            k = max(k - 1, 1)
    return swaps


@numba.njit(cache=True)
def _size_reduce(b, u):
    """One full size-reduction pass (no swaps); b and u updated in place."""
    m, n = b.shape
    bstar = np.zeros((m, n))
    mu = np.zeros((n, n))
    bsq = np.zeros(n)
    _gso_range(b, bstar, mu, bsq, 0)
    for k in range(1, n):
        for j in range(k - 1, -1, -1):
            q = _round_ha(mu[k, j])
            if q != 0.0:
                qi = np.int64(q)
                for r in range(m):
                    b[r, k] -= q * b[r, j]
                for r in range(n):
                    u[r, k] -= qi * u[r, j]
                for jj in range(j):
                    mu[k, jj] -= q * mu[j, jj]
                mu[k, j] -= q


@numba.njit(cache=True)
def _babai(rmat, ytil):
    """Nearest-plane rounding on an upper-triangular system."""
    k = rmat.shape[0]
    x = np.zeros(k, dtype=np.int64)
    for i in range(k - 1, -1, -1):
        s = ytil[i]
        for j in range(i + 1, k):
            s -= rmat[i, j] * x[j]
        x[i] = np.int64(_round_ha(s / rmat[i, i]))
    return x


@numba.njit(cache=True)
def _babai_dist_sq(rmat, ytil):
    """Nearest-plane squared distance, accumulated with exactly the same
    arithmetic as _sphere's first descent so the leaf always fits inside a
    radius derived from it (badly conditioned targets cancel catastrophically
    and any other summation order can land above the true value)."""
    k = rmat.shape[0]
    x = np.zeros(k, dtype=np.int64)
    d = 0.0
    for i in range(k - 1, -1, -1):
        s = ytil[i]
        for j in range(i + 1, k):
            s -= rmat[i, j] * x[j]
        center = s / rmat[i, i]
        x[i] = np.int64(_round_ha(center))
        diff = (center - x[i]) * rmat[i, i]
        d = d + diff * diff
    return d


@numba.njit(cache=True)
def _sphere(rmat, ytil, bound_sq, exclude_zero, shrink):
    """Schnorr-Euchner depth-first enumeration on an upper-triangular system.

    Finds the integer x minimising ||ytil - rmat x||^2, breaking exact ties
    (within TIE_TOL) in favour of the lexicographically smallest x. Layer k
    counts nodes expanded while fixing the k-th coordinate from the bottom
    row of the triangular system; pruned candidates are not counted.

    With shrink the pruning radius tightens to the best leaf found so far;
    without it the whole tree inside bound_sq is expanded (the classic
    fixed-radius search, used for baseline complexity accounting).

    Returns (found, best_x, best_sq, nodes_per_layer).
    """
    n = rmat.shape[0]
    x = np.zeros(n, dtype=np.int64)
    best = np.zeros(n, dtype=np.int64)
    centers = np.zeros(n)
    partial = np.zeros(n + 1)
    step = np.zeros(n, dtype=np.int64)
    nodes = np.zeros(n, dtype=np.int64)
    best_sq = np.inf
    found = False

    i = n - 1
    centers[i] = ytil[i] / rmat[i, i]
    x[i] = np.int64(_round_ha(centers[i]))
    step[i] = 1 if centers[i] >= x[i] else -1

    while True:
        diff = (centers[i] - x[i]) * rmat[i, i]
        d = partial[i + 1] + diff * diff
        limit = bound_sq
        if shrink and best_sq < limit:
            limit = best_sq
        if d <= limit + TIE_TOL:
            nodes[n - 1 - i] += 1
            if i == 0:
                skip = False
                if exclude_zero:
                    skip = True
                    for j in range(n):
                        if x[j] != 0:
                            skip = False
                            break
                if not skip:
                    if not found or d < best_sq - TIE_TOL:
                        best_sq = d
                        for j in range(n):
                            best[j] = x[j]
                        found = True
                    elif d <= best_sq + TIE_TOL:
                        for j in range(n):
                            if x[j] < best[j]:
                                if d < best_sq:
                                    best_sq = d
                                for jj in range(n):
                                    best[jj] = x[jj]
                                break
                            elif x[j] > best[j]:
                                break
                x[0] += step[0]
                step[0] = -step[0] - (1 if step[0] > 0 else -1)
            else:
                partial[i] = d
                i -= 1
                s = ytil[i]
                for j in range(i + 1, n):
                    s -= rmat[i, j] * x[j]
                centers[i] = s / rmat[i, i]
                x[i] = np.int64(_round_ha(centers[i]))
                step[i] = 1 if centers[i] >= x[i] else -1
        else:
            i += 1
            if i == n:
                break
            x[i] += step[i]
            step[i] = -step[i] - (1 if step[i] > 0 else -1)
    return found, best, best_sq, nodes


@numba.njit(cache=True)
def _enum_all(rmat, ytil, radius_sq, out_x, out_d):
    """Record every lattice point with ||ytil - rmat x||^2 <= radius_sq.

    Fills out_x/out_d and returns the number found, or -1 on buffer
    overflow. The radius never shrinks.
    """
    n = rmat.shape[0]
    cap = out_x.shape[0]
    x = np.zeros(n, dtype=np.int64)
    centers = np.zeros(n)
    partial = np.zeros(n + 1)
    step = np.zeros(n, dtype=np.int64)
    count = 0

    i = n - 1
    centers[i] = ytil[i] / rmat[i, i]
    x[i] = np.int64(_round_ha(centers[i]))
    step[i] = 1 if centers[i] >= x[i] else -1

    while True:
        diff = (centers[i] - x[i]) * rmat[i, i]
        d = partial[i + 1] + diff * diff
        if d <= radius_sq + TIE_TOL:
            if i == 0:
                if count >= cap:
                    return -1
                for j in range(n):
                    out_x[count, j] = x[j]
                out_d[count] = d
                count += 1
                x[0] += step[0]
                step[0] = -step[0] - (1 if step[0] > 0 else -1)
            else:
                partial[i] = d
                i -= 1
                s = ytil[i]
                for j in range(i + 1, n):
                    s -= rmat[i, j] * x[j]
                centers[i] = s / rmat[i, i]
                x[i] = np.int64(_round_ha(centers[i]))
                step[i] = 1 if centers[i] >= x[i] else -1
        else:
            i += 1
            if i == n:
                break
            x[i] += step[i]
            step[i] = -step[i] - (1 if step[i] > 0 else -1)
    return count


def warmup():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    b = np.array([[1.0, 0.7], [0.0, 1.0]])
    u = np.eye(2, dtype=np.int64)
    _lll(b.copy(), u.copy(), 0.75, 1000)
    _size_reduce(b.copy(), u.copy())
    r = np.array([[2.0, 1.0], [0.0, 1.0]])
    y = np.array([0.3, 0.4])
    _babai(r, y)
    _sphere(r, y, np.inf, False, True)
    _sphere(r, y, 4.0, False, False)
    out_x = np.zeros((16, 2), dtype=np.int64)
    out_d = np.zeros(16)
    _enum_all(r, y, 4.0, out_x, out_d)
