"""3D label volumes: in-memory representation and raw-file I/O.

A volume is a dense grid of 8-bit labels with physical voxel spacing.
On disk it is a pair of files: a small JSON header and a raw payload of
exactly Nx*Ny*Nz bytes in x-fastest order (x varies fastest, then y,
then z, no padding or compression).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DTYPE_TAG = "u8"
ORDER_TAG = "x-fastest"

# BraTS-style default: the three tumor classes collapse to one.
DEFAULT_TUMOR_LABELS = frozenset({1, 2, 4})


class HeaderError(ValueError):
    """Header file is missing required fields or holds invalid values."""


class PayloadMismatchError(ValueError):
    """Payload byte count disagrees with the header dims."""


class EmptyMaskError(ValueError):
    """Operation requires at least one tumor voxel."""


@dataclass(frozen=True)
class VolumeHeader:
    """Parsed, validated volume header."""

    dims: tuple[int, int, int]
    spacing_mm: tuple[float, float, float]
    dtype: str
    order: str
    payload: str

    def __post_init__(self):
        if self.dtype != DTYPE_TAG:
            raise HeaderError(f"dtype must be '{DTYPE_TAG}', got {self.dtype!r}")
        if self.order != ORDER_TAG:
            raise HeaderError(f"order must be '{ORDER_TAG}', got {self.order!r}")
        if len(self.dims) != 3 or any(d <= 0 for d in self.dims):
            raise HeaderError(f"dims must be three positive integers, got {self.dims}")
        if len(self.spacing_mm) != 3 or any(s <= 0 for s in self.spacing_mm):
            raise HeaderError(f"spacing_mm must be positive, got {self.spacing_mm}")


@dataclass(frozen=True, eq=False)
class LabelVolume:
    """Immutable 3D grid of 8-bit labels.

    ``data`` is indexed ``[z, y, x]`` (C order), which makes its flat
    memory layout x-fastest, matching the on-disk payload. Public
    coordinate tuples are always ``(x, y, z)``.
    """

    dims: tuple[int, int, int]
    spacing_mm: tuple[float, float, float]
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        spacing = tuple(float(s) for s in self.spacing_mm)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ValueError(f"dims must be three positive integers, got {self.dims}")
        if len(spacing) != 3 or any(s <= 0 for s in spacing):
            raise ValueError(f"spacing_mm must be three positive reals, got {self.spacing_mm}")
        data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if data.size != dims[0] * dims[1] * dims[2]:
            raise ValueError(
                f"data has {data.size} voxels, dims {dims} require {dims[0] * dims[1] * dims[2]}"
            )
        data = data.reshape(self.shape_zyx(dims))
        data.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing_mm", spacing)
        object.__setattr__(self, "data", data)

    @staticmethod
    def shape_zyx(dims):
        nx, ny, nz = dims
        return (nz, ny, nx)

    @property
    def voxel_volume_mm3(self) -> float:
        sx, sy, sz = self.spacing_mm
        return sx * sy * sz

    @property
    def is_binary(self) -> bool:
        return bool((self.data <= 1).all())

    def __eq__(self, other):
        if not isinstance(other, LabelVolume):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.spacing_mm == other.spacing_mm
            and np.array_equal(self.data, other.data)
        )


def read_header(header_path) -> VolumeHeader:
    """Parse and validate a JSON volume header."""
    header_path = Path(header_path)
    if not header_path.is_file():
        raise FileNotFoundError(f"header file not found: {header_path}")
    try:
        raw = json.loads(header_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise HeaderError(f"{header_path}: not valid JSON ({exc})") from exc
    for key in ("dims", "spacing_mm", "dtype", "order", "payload"):
        if key not in raw:
            raise HeaderError(f"{header_path}: missing field '{key}'")
    try:
        dims = tuple(int(d) for d in raw["dims"])
        spacing = tuple(float(s) for s in raw["spacing_mm"])
    except (TypeError, ValueError) as exc:
        raise HeaderError(f"{header_path}: bad dims/spacing_mm ({exc})") from exc
    try:
        return VolumeHeader(dims=dims, spacing_mm=spacing, dtype=raw["dtype"],
                            order=raw["order"], payload=str(raw["payload"]))
    except HeaderError as exc:
        raise HeaderError(f"{header_path}: {exc}") from exc


def load_volume(header_path) -> LabelVolume:
    """Read a volume from its JSON header and raw payload.

    Raises FileNotFoundError for missing files, HeaderError for a
    malformed header, and PayloadMismatchError when the payload byte
    count does not equal Nx*Ny*Nz.
    """
    header_path = Path(header_path)
    header = read_header(header_path)
    payload_path = header_path.parent / header.payload
    if not payload_path.is_file():
        raise FileNotFoundError(f"payload file not found: {payload_path}")
    raw = payload_path.read_bytes()
    nx, ny, nz = header.dims
    expected = nx * ny * nz
    if len(raw) != expected:
        raise PayloadMismatchError(
            f"{payload_path}: payload holds {len(raw)} bytes, dims {header.dims} require {expected}"
        )
    data = np.frombuffer(raw, dtype=np.uint8)
    return LabelVolume(dims=header.dims, spacing_mm=header.spacing_mm, data=data)


def save_volume(v: LabelVolume, header_path) -> None:
    """Write header + payload such that load_volume inverts it exactly."""
    header_path = Path(header_path)
    payload_path = header_path.with_suffix(".raw")
    header = {
        "dims": list(v.dims),
        "spacing_mm": list(v.spacing_mm),
        "dtype": DTYPE_TAG,
        "order": ORDER_TAG,
        "payload": payload_path.name,
    }
    header_path.write_text(json.dumps(header, indent=2) + "\n", encoding="utf-8")
    payload_path.write_bytes(v.data.tobytes())


def binarize(v: LabelVolume, tumor_labels=DEFAULT_TUMOR_LABELS) -> LabelVolume:
    """Map voxels to 1 when their label is in ``tumor_labels``, else 0."""
    labels = np.array(sorted(tumor_labels), dtype=np.uint8)
    data = np.isin(v.data, labels).astype(np.uint8)
    return LabelVolume(dims=v.dims, spacing_mm=v.spacing_mm, data=data)


def centroid(v: LabelVolume) -> tuple[float, float, float]:
    """Mean 0-based (x, y, z) coordinate of all voxels equal to 1."""
    zs, ys, xs = np.nonzero(v.data)
    if xs.size == 0:
        raise EmptyMaskError("volume contains no tumor voxels")
    return (float(xs.mean()), float(ys.mean()), float(zs.mean()))


def total_tumor(v: LabelVolume) -> int:
    """Count of voxels equal to 1."""
    return int(np.count_nonzero(v.data == 1))


def as_label_volume(X, spacing_mm=(1.0, 1.0, 1.0)) -> LabelVolume:
    """Coerce an input into a binary LabelVolume.

    Accepts a LabelVolume (returned as-is after a binary check) or any
    3D array-like indexed [z, y, x] whose values are 0/1.
    """
    if isinstance(X, LabelVolume):
        vol = X
    else:
        arr = np.asarray(X)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3D array, got shape {arr.shape}")
        nz, ny, nx = arr.shape
        vol = LabelVolume(dims=(nx, ny, nz), spacing_mm=spacing_mm, data=arr.astype(np.uint8))
    if not vol.is_binary:
        raise ValueError("volume is not binary; run binarize() first")
    return vol
