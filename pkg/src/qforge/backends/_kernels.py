"""Numba kernels for the state-vector simulator.

All kernels are compiled with ``parallel=True``; the number of lanes is set
per call with ``numba.set_num_threads``. Every output element is computed by
exactly the same arithmetic whatever the lane count, and reductions go
through a fixed number of chunks summed in order, so results do not depend on
the number of threads.
"""
from __future__ import annotations

import os

# Reserve a few worker threads even on small machines so callers can ask for
# k > 1 lanes; numba reads this once, at import.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(4, os.cpu_count() or 1)))
# OpenMP tolerates calls from several Python threads (the HTTP service runs
# requests in a thread pool); the older TBB found on some systems does not load.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numba as nb  # noqa: E402
import numpy as np  # noqa: E402


def max_lanes() -> int:
    return nb.config.NUMBA_NUM_THREADS


def set_lanes(k: int) -> None:
    nb.set_num_threads(max(1, min(int(k), max_lanes())))


@nb.njit(parallel=True, cache=True)
def apply_1q(psi, m00, m01, m10, m11, t, cmask):
    half = psi.size >> 1
    bit = np.int64(1) << t
    lo = bit - 1
    for k in nb.prange(half):
        i0 = ((k & ~lo) << 1) | (k & lo)
        if (i0 & cmask) == cmask:
            i1 = i0 | bit
            a = psi[i0]
            b = psi[i1]
            psi[i0] = m00 * a + m01 * b
            psi[i1] = m10 * a + m11 * b


@nb.njit(parallel=True, cache=True)
def apply_diag(psi, d0, d1, t, cmask):
    bit = np.int64(1) << t
    for i in nb.prange(psi.size):
        if (i & cmask) == cmask:
            if i & bit:
                psi[i] = d1 * psi[i]
            else:
                psi[i] = d0 * psi[i]


@nb.njit(parallel=True, cache=True)
def apply_2q(psi, m, t0, t1, cmask):
    """4x4 ``m`` on bits (t0, t1); t0 is the low bit of the 2-qubit index."""
    quarter = psi.size >> 2
    b0 = np.int64(1) << t0
    b1 = np.int64(1) << t1
    lo_bit = min(t0, t1)
    hi_bit = max(t0, t1)
    lo_mask = (np.int64(1) << lo_bit) - 1
    hi_mask = (np.int64(1) << hi_bit) - 1
    for k in nb.prange(quarter):
        i = ((k & ~lo_mask) << 1) | (k & lo_mask)
        i = ((i & ~hi_mask) << 1) | (i & hi_mask)
        if (i & cmask) != cmask:
            continue
        idx0 = i
        idx1 = i | b0
        idx2 = i | b1
        idx3 = i | b0 | b1
        a0 = psi[idx0]
        a1 = psi[idx1]
        a2 = psi[idx2]
        a3 = psi[idx3]
        psi[idx0] = m[0, 0] * a0 + m[0, 1] * a1 + m[0, 2] * a2 + m[0, 3] * a3
        psi[idx1] = m[1, 0] * a0 + m[1, 1] * a1 + m[1, 2] * a2 + m[1, 3] * a3
        psi[idx2] = m[2, 0] * a0 + m[2, 1] * a1 + m[2, 2] * a2 + m[2, 3] * a3
        psi[idx3] = m[3, 0] * a0 + m[3, 1] * a1 + m[3, 2] * a2 + m[3, 3] * a3


@nb.njit(parallel=True, cache=True)
def permute_contiguous(src, dst, table, p, w, cmask):
    """Basis permutation of the register occupying bits p..p+w-1."""
    low = (np.int64(1) << w) - 1
    reg = low << p
    for i in nb.prange(src.size):
        if (i & cmask) == cmask:
            x = (i >> p) & low
            dst[(i & ~reg) | (table[x] << p)] = src[i]
        else:
            dst[i] = src[i]


@nb.njit(parallel=True, cache=True)
def permute_general(src, dst, table, pos, cmask):
    w = pos.size
    reg = np.int64(0)
    for b in range(w):
        reg |= np.int64(1) << pos[b]
    for i in nb.prange(src.size):
        if (i & cmask) == cmask:
            x = np.int64(0)
            for b in range(w):
                x |= ((i >> pos[b]) & 1) << b
            y = table[x]
            j = i & ~reg
            for b in range(w):
                j |= ((y >> b) & 1) << pos[b]
            dst[j] = src[i]
        else:
            dst[i] = src[i]


@nb.njit(parallel=True, cache=True)
def weight_where(psi, mask, value):
    """Sum of |amp|^2 over indices with (i & mask) == value, chunked deterministically."""
    size = psi.size
    chunks = 64
    step = (size + chunks - 1) // chunks
    partial = np.zeros(chunks)
    for c in nb.prange(chunks):
        s = 0.0
        end = min(size, (c + 1) * step)
        for i in range(c * step, end):
            if (i & mask) == value:
                a = psi[i]
                s += a.real * a.real + a.imag * a.imag
        partial[c] = s
    total = 0.0
    for c in range(chunks):
        total += partial[c]
    return total


@nb.njit(parallel=True, cache=True)
def collapse(psi, mask, value, scale):
    for i in nb.prange(psi.size):
        if (i & mask) == value:
            psi[i] = psi[i] * scale
        else:
            psi[i] = 0.0
