"""Pure NumPy kernels for tree sampling and enclosure propagation.

Fallback backend: vectorizes across the nodes of one level. The numba
backend implements the same functions with per-node loops; both must
produce bit-identical results, so every floating-point reduction below
accumulates in the same order as the scalar code (ascending convolution
index), and the splitmix64 stream is shared.
"""

from __future__ import annotations

import numpy as np

U64_MASK = (1 << 64) - 1
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
DRAW_SALT = np.uint64(0x9E6C63D0876A9F4B)
SEED_SALT = 0xD1B54A32D192ED03
_INV_2_53 = 2.0**-53
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


def mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays."""
    z = x + GOLDEN
    z = (z ^ (z >> _S30)) * MIX_A
    z = (z ^ (z >> _S27)) * MIX_B
    return z ^ (z >> _S31)


def mix64_int(x: int) -> int:
    """Reference scalar mixer on Python ints (masked to 64 bits)."""
    z = (x + 0x9E3779B97F4A7C15) & U64_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & U64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & U64_MASK
    return z ^ (z >> 31)


def base_key(seed: int) -> int:
    return mix64_int((seed & U64_MASK) ^ SEED_SALT)


def _unit(keys: np.ndarray) -> np.ndarray:
    return (mix64(keys ^ DRAW_SALT) >> _S11).astype(np.float64) * _INV_2_53


def sample_level_indices(
    qs: np.ndarray, cdf: np.ndarray, depth: int, root_key: int
) -> tuple[np.ndarray, np.ndarray]:
    """Child-count indices (into qs) for all internal levels 0..depth-1.

    The child count of a node is a pure function of (root_key, path), so
    deepening the truncation extends the same infinite tree.
    Returns (idx_flat, level_ptr); level d occupies
    idx_flat[level_ptr[d]:level_ptr[d+1]].
    """
    keys = np.array([root_key], dtype=np.uint64)
    levels = []
    for d in range(depth):
        idx = np.searchsorted(cdf, _unit(keys), side="right").astype(np.int64)
        levels.append(idx)
        if d + 1 < depth:
            counts = qs[idx]
            total = int(counts.sum())
            parent = np.repeat(np.arange(keys.size, dtype=np.int64), counts)
            starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
            rank = np.arange(total, dtype=np.int64) - np.repeat(starts, counts)
            keys = mix64(keys[parent] + (rank + 1).astype(np.uint64))
    level_ptr = np.zeros(depth + 1, dtype=np.int64)
    for d, idx in enumerate(levels):
        level_ptr[d + 1] = level_ptr[d] + idx.size
    return np.concatenate(levels), level_ptr


def _conv_trunc(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated Cauchy product along axis 1, ascending-index summation."""
    out = np.zeros_like(a)
    L = a.shape[1]
    for k in range(L):
        col = out[:, k]
        for t in range(k + 1):
            col += a[:, t] * b[:, k - t]
    return out


def enclosure(
    idx_flat: np.ndarray,
    level_ptr: np.ndarray,
    qs: np.ndarray,
    factors: np.ndarray,
    front_lo: np.ndarray,
    front_hi: np.ndarray,
    n_particles: int,
) -> tuple[float, float]:
    """Interval for the root value of the per-tree recursion.

    Bottom-up pass: a node with q children multiplies each child vector by
    the level weights factors[*, k] = q^(-k - beta*C(k,2)) and convolves;
    frontier children use the [front_lo, front_hi] brackets.  All factors
    are non-negative for beta >= 0, so lower/upper propagate separately.
    """
    depth = level_ptr.size - 1
    L = n_particles + 1
    zlo = zhi = None
    for d in range(depth - 1, -1, -1):
        idx = idx_flat[level_ptr[d] : level_ptr[d + 1]]
        counts = qs[idx]
        m = idx.size
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        nlo = np.empty((m, L))
        nhi = np.empty((m, L))
        for pos in range(qs.size):
            sel = np.nonzero(idx == pos)[0]
            if sel.size == 0:
                continue
            q = int(qs[pos])
            fac = factors[pos]
            if zlo is None:
                g_lo_const = np.repeat((fac * front_lo)[None, :], sel.size, axis=0)
                g_hi_const = np.repeat((fac * front_hi)[None, :], sel.size, axis=0)
            acc_lo = acc_hi = None
            for j in range(q):
                if zlo is None:
                    g_lo, g_hi = g_lo_const, g_hi_const
                else:
                    rows = starts[sel] + j
                    g_lo = fac * zlo[rows]
                    g_hi = fac * zhi[rows]
                if j == 0:
                    acc_lo = g_lo.copy()
                    acc_hi = g_hi.copy()
                else:
                    acc_lo = _conv_trunc(acc_lo, g_lo)
                    acc_hi = _conv_trunc(acc_hi, g_hi)
            nlo[sel] = acc_lo
            nhi[sel] = acc_hi
        zlo, zhi = nlo, nhi
    return float(zlo[0, n_particles]), float(zhi[0, n_particles])


def mc_batch(
    qs: np.ndarray,
    cdf: np.ndarray,
    factors: np.ndarray,
    front_lo: np.ndarray,
    front_hi: np.ndarray,
    n_particles: int,
    depth: int,
    base: int,
    start: int,
    count: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Enclosure midpoints and widths for samples [start, start+count)."""
    base = int(base)
    mids = np.empty(count)
    widths = np.empty(count)
    for i in range(count):
        root = mix64_int((base + start + i) & U64_MASK)
        idx_flat, level_ptr = sample_level_indices(qs, cdf, depth, root)
        lo, hi = enclosure(idx_flat, level_ptr, qs, factors, front_lo, front_hi, n_particles)
        mids[i] = 0.5 * (lo + hi)
        widths[i] = hi - lo
    return mids, widths
