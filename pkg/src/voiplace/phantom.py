"""Synthetic label volumes with analytically known content.

Phantoms are unions of boxes and ellipsoids rasterized on the voxel
lattice, optionally degraded by independent salt noise, and serve as
ground truth for tests and benchmarks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .volume import LabelVolume


class PhantomBoundsError(ValueError):
    """A shape does not fit inside the volume dims."""


@dataclass(frozen=True)
class Box:
    corner: tuple[float, float, float]  # (x, y, z) voxels, inclusive low corner
    size: tuple[float, float, float]

    def check_bounds(self, dims):
        for c, s, n in zip(self.corner, self.size, dims):
            if s <= 0 or c < 0 or c + s > n:
                raise PhantomBoundsError(f"box corner={self.corner} size={self.size} exceeds dims {dims}")

    def paint(self, mask, grids):
        xs, ys, zs = grids
        hit = np.ones(mask.shape, dtype=bool)
        for g, c, s in zip((zs, ys, xs), reversed(self.corner), reversed(self.size)):
            hit &= (g >= c) & (g < c + s)
        mask |= hit


@dataclass(frozen=True)
class Ellipsoid:
    center: tuple[float, float, float]  # (x, y, z) voxels
    semi_axes: tuple[float, float, float]

    def check_bounds(self, dims):
        for c, a, n in zip(self.center, self.semi_axes, dims):
            if a <= 0 or c - a < 0 or c + a > n - 1:
                raise PhantomBoundsError(
                    f"ellipsoid center={self.center} semi_axes={self.semi_axes} exceeds dims {dims}"
                )

    def paint(self, mask, grids):
        xs, ys, zs = grids
        cx, cy, cz = self.center
        ax, ay, az = self.semi_axes
        q = ((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2 + ((zs - cz) / az) ** 2
        mask |= q <= 1.0


@dataclass(frozen=True)
class PhantomSpec:
    dims: tuple[int, int, int]
    spacing_mm: tuple[float, float, float] = (1.0, 1.0, 1.0)
    shapes: tuple = field(default_factory=tuple)
    noise_p: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.noise_p < 1.0:
            raise ValueError(f"noise_p must be in [0, 1), got {self.noise_p}")
        object.__setattr__(self, "shapes", tuple(self.shapes))


def make_phantom(spec: PhantomSpec) -> LabelVolume:
    """Rasterize the spec's shapes, then flip each voxel with probability noise_p.

    Membership is tested at integer voxel coordinates: a box covers
    corner <= c < corner+size componentwise, an ellipsoid covers
    sum(((c_i - center_i)/a_i)^2) <= 1.
    """
    for shape in spec.shapes:
        shape.check_bounds(spec.dims)
    nx, ny, nz = spec.dims
    zs, ys, xs = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    mask = np.zeros((nz, ny, nx), dtype=bool)
    for shape in spec.shapes:
        shape.paint(mask, (xs, ys, zs))
    data = mask.astype(np.uint8)
    if spec.noise_p > 0.0:
        rng = np.random.default_rng(spec.seed)
        flips = rng.random(data.shape) < spec.noise_p
        data = data ^ flips.astype(np.uint8)
    return LabelVolume(dims=spec.dims, spacing_mm=spec.spacing_mm, data=data)


def sphere_phantom(n: int, radius: float, spacing_mm=(1.0, 1.0, 1.0)) -> LabelVolume:
    """Solid sphere of the given voxel radius centered in an n^3 volume."""
    c = (n - 1) / 2
    spec = PhantomSpec(
        dims=(n, n, n),
        spacing_mm=spacing_mm,
        shapes=(Ellipsoid(center=(c, c, c), semi_axes=(radius, radius, radius)),),
    )
    return make_phantom(spec)


def load_phantom_spec(path) -> PhantomSpec:
    """Parse a phantom description from a JSON file.

    Expected fields: dims, optional spacing_mm, shapes (list of
    {"type": "box", "corner", "size"} or {"type": "ellipsoid",
    "center", "semi_axes"}), optional noise_p and seed.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"phantom spec not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if "dims" not in raw or "shapes" not in raw:
        raise ValueError(f"{path}: phantom spec requires 'dims' and 'shapes'")
    shapes = []
    for i, entry in enumerate(raw["shapes"]):
        kind = entry.get("type")
        if kind == "box":
            shapes.append(Box(corner=tuple(entry["corner"]), size=tuple(entry["size"])))
        elif kind == "ellipsoid":
            shapes.append(Ellipsoid(center=tuple(entry["center"]), semi_axes=tuple(entry["semi_axes"])))
        else:
            raise ValueError(f"{path}: shape {i} has unknown type {kind!r}")
    return PhantomSpec(
        dims=tuple(int(d) for d in raw["dims"]),
        spacing_mm=tuple(float(s) for s in raw.get("spacing_mm", (1.0, 1.0, 1.0))),
        shapes=tuple(shapes),
        noise_p=float(raw.get("noise_p", 0.0)),
        seed=int(raw.get("seed", 0)),
    )
