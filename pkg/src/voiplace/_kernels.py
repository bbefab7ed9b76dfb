"""Compiled naive offset scans for the benchmark baseline.

These kernels perform the straightforward per-offset box summation
(O(Rx*Ry*Rz) work per offset, no precomputed tables), exactly what
``region_sum_bruteforce`` computes one call at a time. Compilation
keeps the baseline measurable at realistic volume sizes; results are
pinned to the bruteforce oracle by tests.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def _box_sums_full(vol, rx, ry, rz, out):
    nz, ny, nx = vol.shape
    for vz in range(nz - rz + 1):
        for vy in range(ny - ry + 1):
            for vx in range(nx - rx + 1):
                s = numba.int64(0)
                for z in range(vz, vz + rz):
                    for y in range(vy, vy + ry):
                        row = vol[z, y, vx : vx + rx]
                        r = numba.int32(0)
                        for x in range(rx):
                            r += row[x]
                        s += r
                out[vz, vy, vx] = s


def box_sums_full(vol_zyx: np.ndarray, size) -> np.ndarray:
    """Naive region sums for every valid offset; (Kz, Ky, Kx) int64."""
    rx, ry, rz = (int(c) for c in size)
    nz, ny, nx = vol_zyx.shape
    out = np.empty((nz - rz + 1, ny - ry + 1, nx - rx + 1), dtype=np.int64)
    _box_sums_full(vol_zyx, rx, ry, rz, out)
    return out
