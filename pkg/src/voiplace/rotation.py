"""Rigid rotation of label volumes by nearest-neighbor resampling.

Angles are intrinsic rotations about x, then y, then z, in degrees:
the combined matrix is R = Rz(a3) @ Ry(a2) @ Rx(a1). Resampling pulls
each output voxel from source coordinate R @ (c - center) + center in
millimeter space (equivalently, the label content is transformed by
the inverse matrix), so a box found in the rotated frame maps back to
scanner space through the forward matrix. The rotation center is the
geometric volume center; out-of-field samples are non-tumor.
"""

from __future__ import annotations

import math

import numpy as np

from .volume import LabelVolume


def rotation_matrix(angles_deg) -> np.ndarray:
    """3x3 right-handed rotation matrix for (a1, a2, a3) degrees."""
    a1, a2, a3 = (math.radians(float(a)) for a in angles_deg)
    c1, s1 = math.cos(a1), math.sin(a1)
    c2, s2 = math.cos(a2), math.sin(a2)
    c3, s3 = math.cos(a3), math.sin(a3)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, c1, -s1], [0.0, s1, c1]])
    ry = np.array([[c2, 0.0, s2], [0.0, 1.0, 0.0], [-s2, 0.0, c2]])
    rz = np.array([[c3, -s3, 0.0], [s3, c3, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry @ rx


def canonical_angles(angles_deg) -> tuple[float, float, float]:
    """Wrap each angle into [-180, 180) for reporting."""
    return tuple(float((a + 180.0) % 360.0 - 180.0) for a in angles_deg)


def rotate_labels(v: LabelVolume, angles_deg) -> LabelVolume:
    """Resample a binary volume under the given rotation.

    Output dims equal input dims; each output voxel takes the nearest
    source voxel's value, or 0 when the source point leaves the volume.
    """
    mat = rotation_matrix(angles_deg)
    nx, ny, nz = v.dims
    sx, sy, sz = v.spacing_mm
    cx, cy, cz = (nx - 1) / 2 * sx, (ny - 1) / 2 * sy, (nz - 1) / 2 * sz
    # Separable coordinate arithmetic: broadcast per-axis mm offsets.
    dx = (np.arange(nx) * sx - cx)[None, None, :]
    dy = (np.arange(ny) * sy - cy)[None, :, None]
    dz = (np.arange(nz) * sz - cz)[:, None, None]
    ix = np.rint((mat[0, 0] * dx + mat[0, 1] * dy + mat[0, 2] * dz + cx) / sx).astype(np.intp)
    iy = np.rint((mat[1, 0] * dx + mat[1, 1] * dy + mat[1, 2] * dz + cy) / sy).astype(np.intp)
    iz = np.rint((mat[2, 0] * dx + mat[2, 1] * dy + mat[2, 2] * dz + cz) / sz).astype(np.intp)
    inside = (
        (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny) & (iz >= 0) & (iz < nz)
    )
    np.clip(ix, 0, nx - 1, out=ix)
    np.clip(iy, 0, ny - 1, out=iy)
    np.clip(iz, 0, nz - 1, out=iz)
    flat = (iz * ny + iy) * nx + ix
    out = v.data.reshape(-1)[flat.reshape(-1)].reshape(v.data.shape).copy()
    out[~inside] = 0
    return LabelVolume(dims=v.dims, spacing_mm=v.spacing_mm, data=out)
