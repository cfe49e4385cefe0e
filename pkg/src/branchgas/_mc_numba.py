"""Numba kernels for tree sampling and enclosure propagation.

Hot path of the Monte Carlo estimator.  Must stay bit-identical to the
pure NumPy backend in `_mc_numpy`: same splitmix64 stream, same
ascending-index convolution sums.  All kernels release the GIL so the
estimator can spread sample chunks across threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
DRAW_SALT = np.uint64(0x9E6C63D0876A9F4B)
_INV_2_53 = 2.0**-53
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


@njit(cache=True, nogil=True)
def _mix64(x):
    z = x + GOLDEN
    z = (z ^ (z >> _S30)) * MIX_A
    z = (z ^ (z >> _S27)) * MIX_B
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _unit(key):
    return np.float64(_mix64(key ^ DRAW_SALT) >> _S11) * _INV_2_53


@njit(cache=True, nogil=True)
def sample_level_indices(qs, cdf, depth, root_key):
    """Child-count indices (into qs) for levels 0..depth-1, flat layout."""
    cap = 64
    idx_flat = np.empty(cap, np.int64)
    level_ptr = np.empty(depth + 1, np.int64)
    level_ptr[0] = 0
    keys = np.empty(1, np.uint64)
    keys[0] = root_key
    total = 0
    for d in range(depth):
        m = keys.size
        while total + m > cap:
            cap *= 2
            grown = np.empty(cap, np.int64)
            grown[:total] = idx_flat[:total]
            idx_flat = grown
        children = 0
        for i in range(m):
            u = _unit(keys[i])
            pos = 0
            while u >= cdf[pos]:
                pos += 1
            idx_flat[total + i] = pos
            children += qs[pos]
        if d + 1 < depth:
            nxt = np.empty(children, np.uint64)
            w = 0
            for i in range(m):
                q = qs[idx_flat[total + i]]
                for j in range(q):
                    nxt[w] = _mix64(keys[i] + np.uint64(j + 1))
                    w += 1
            keys = nxt
        total += m
        level_ptr[d + 1] = total
    return idx_flat[:total], level_ptr


@njit(cache=True, nogil=True)
def enclosure(idx_flat, level_ptr, qs, factors, front_lo, front_hi, n_particles):
    """Interval for the root value of the per-tree recursion (see the
    NumPy backend for the contract)."""
    depth = level_ptr.size - 1
    L = n_particles + 1
    zlo = np.empty((0, L))
    zhi = np.empty((0, L))
    have_children = False
    acc_lo = np.empty(L)
    acc_hi = np.empty(L)
    tmp_lo = np.empty(L)
    tmp_hi = np.empty(L)
    g_lo = np.empty(L)
    g_hi = np.empty(L)
    for d in range(depth - 1, -1, -1):
        base = level_ptr[d]
        m = level_ptr[d + 1] - base
        nlo = np.empty((m, L))
        nhi = np.empty((m, L))
        child_off = 0
        for i in range(m):
            pos = idx_flat[base + i]
            q = qs[pos]
            for j in range(q):
                if have_children:
                    row = child_off + j
                    for k in range(L):
                        g_lo[k] = factors[pos, k] * zlo[row, k]
                        g_hi[k] = factors[pos, k] * zhi[row, k]
                else:
                    for k in range(L):
                        g_lo[k] = factors[pos, k] * front_lo[k]
                        g_hi[k] = factors[pos, k] * front_hi[k]
                if j == 0:
                    for k in range(L):
                        acc_lo[k] = g_lo[k]
                        acc_hi[k] = g_hi[k]
                else:
                    for k in range(L):
                        s_lo = 0.0
                        s_hi = 0.0
                        for t in range(k + 1):
                            s_lo += acc_lo[t] * g_lo[k - t]
                            s_hi += acc_hi[t] * g_hi[k - t]
                        tmp_lo[k] = s_lo
                        tmp_hi[k] = s_hi
                    for k in range(L):
                        acc_lo[k] = tmp_lo[k]
                        acc_hi[k] = tmp_hi[k]
            for k in range(L):
                nlo[i, k] = acc_lo[k]
                nhi[i, k] = acc_hi[k]
            child_off += q
        zlo = nlo
        zhi = nhi
        have_children = True
    return zlo[0, n_particles], zhi[0, n_particles]


@njit(cache=True, nogil=True)
def mc_batch(qs, cdf, factors, front_lo, front_hi, n_particles, depth, base, start, count):
    """Enclosure midpoints and widths for samples [start, start+count)."""
    mids = np.empty(count)
    widths = np.empty(count)
    for i in range(count):
        root = _mix64(base + np.uint64(start + i))
        idx_flat, level_ptr = sample_level_indices(qs, cdf, depth, root)
        lo, hi = enclosure(idx_flat, level_ptr, qs, factors, front_lo, front_hi, n_particles)
        mids[i] = 0.5 * (lo + hi)
        widths[i] = hi - lo
    return mids, widths
