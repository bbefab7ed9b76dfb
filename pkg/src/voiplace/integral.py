"""3D summed-area tables and constant-time rectangular region sums.

The table is zero-padded: entry [c, b, a] holds the sum of all voxels
with x < a, y < b, z < c, so any half-open box [V, V+R) costs eight
lookups. ``region_sum_bruteforce`` is the O(Rx*Ry*Rz) per-call
counterpart used both as the conventional-computation baseline in
benchmarks and as the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .volume import LabelVolume


@dataclass(frozen=True, eq=False)
class SummedAreaTable3D:
    dims: tuple[int, int, int]
    spacing_mm: tuple[float, float, float]
    table: np.ndarray = field(repr=False)  # (Nz+1, Ny+1, Nx+1) uint64, zero boundary at index 0


def build_sat(v: LabelVolume) -> SummedAreaTable3D:
    """Cumulative-sum table of a binary volume, one pass per axis."""
    nx, ny, nz = v.dims
    if not v.is_binary:
        raise ValueError("build_sat requires a binary volume")
    cells = (nx + 1) * (ny + 1) * (nz + 1)
    if cells > np.iinfo(np.intp).max:
        raise ValueError(f"table of {cells} cells exceeds addressable size")
    table = np.zeros((nz + 1, ny + 1, nx + 1), dtype=np.uint64)
    table[1:, 1:, 1:] = v.data
    np.cumsum(table, axis=0, out=table)
    np.cumsum(table, axis=1, out=table)
    np.cumsum(table, axis=2, out=table)
    table.flags.writeable = False
    return SummedAreaTable3D(dims=v.dims, spacing_mm=v.spacing_mm, table=table)


def _check_region(dims, offset, size):
    for v, r, n in zip(offset, size, dims):
        if r <= 0:
            raise ValueError(f"region size must be positive, got {size}")
        if v < 0 or v + r > n:
            raise ValueError(f"region offset={offset} size={size} out of bounds for dims {dims}")


def region_sum(t: SummedAreaTable3D, offset, size) -> int:
    """Tumor count in the half-open box [offset, offset+size), via
    eight-term inclusion-exclusion on the table."""
    _check_region(t.dims, offset, size)
    ax, ay, az = (int(v) for v in offset)
    bx, by, bz = (int(v + r) for v, r in zip(offset, size))
    T = t.table
    return int(
        int(T[bz, by, bx])
        - int(T[bz, by, ax])
        - int(T[bz, ay, bx])
        - int(T[az, by, bx])
        + int(T[bz, ay, ax])
        + int(T[az, ay, bx])
        + int(T[az, by, ax])
        - int(T[az, ay, ax])
    )


def region_sum_bruteforce(v: LabelVolume, offset, size) -> int:
    """Direct summation over the box; O(Rx*Ry*Rz) per call."""
    _check_region(v.dims, offset, size)
    vx, vy, vz = (int(c) for c in offset)
    rx, ry, rz = (int(c) for c in size)
    return int(v.data[vz : vz + rz, vy : vy + ry, vx : vx + rx].sum(dtype=np.int64))


def offset_sums(t: SummedAreaTable3D, size) -> np.ndarray:
    """Region sums for every valid offset at a fixed size.

    Returns a (Kz, Ky, Kx) uint64 array with K_i = N_i - R_i + 1,
    indexed [Vz, Vy, Vx]; entry equals region_sum(t, V, size).
    """
    nx, ny, nz = t.dims
    rx, ry, rz = (int(c) for c in size)
    _check_region(t.dims, (0, 0, 0), size)
    kx, ky, kz = nx - rx + 1, ny - ry + 1, nz - rz + 1
    T = t.table
    # In-place accumulation over the eight corner slices; uint64
    # wraparound in intermediate terms is harmless since the final value
    # is non-negative and exact mod 2^64.
    out = T[rz:, ry:, rx:].copy()
    np.subtract(out, T[:kz, ry:, rx:], out=out)
    np.subtract(out, T[rz:, :ky, rx:], out=out)
    np.subtract(out, T[rz:, ry:, :kx], out=out)
    np.add(out, T[:kz, :ky, rx:], out=out)
    np.add(out, T[rz:, :ky, :kx], out=out)
    np.add(out, T[:kz, ry:, :kx], out=out)
    np.subtract(out, T[:kz, :ky, :kx], out=out)
    return out


def line_sums(t: SummedAreaTable3D, offset, size, axis: int) -> np.ndarray:
    """Region sums for all positions of the box along one axis.

    The two other offset components stay at ``offset``; axis is 0 for
    x, 1 for y, 2 for z. Returns a 1D uint64 array of length
    N_axis - R_axis + 1.
    """
    nx, ny, nz = t.dims
    _check_region(t.dims, [0 if i == axis else offset[i] for i in range(3)], size)
    a = [int(c) for c in offset]
    b = [int(c + r) for c, r in zip(offset, size)]
    n = (nx, ny, nz)[axis]
    k = n - int(size[axis]) + 1
    lo = np.arange(k, dtype=np.intp)
    hi = lo + int(size[axis])
    T = t.table

    def term(ix, iy, iz):
        idx = [iz, iy, ix]
        return T[tuple(idx)]

    xa, ya, za = a
    xb, yb, zb = b
    sel = [(xa, xb), (ya, yb), (za, zb)]
    sel[axis] = (lo, hi)
    (xa, xb), (ya, yb), (za, zb) = sel
    return (
        term(xb, yb, zb)
        - term(xa, yb, zb)
        - term(xb, ya, zb)
        - term(xb, yb, za)
        + term(xa, ya, zb)
        + term(xb, ya, za)
        + term(xa, yb, za)
        - term(xa, ya, za)
    )
