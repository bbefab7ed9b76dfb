"""9-parameter region search: offset, size, and angle coordinate descent.

One parameter among (Rx, Ry, Rz, a1, a2, a3) is focused at a time while
the other five stay fixed; every candidate value of the focused
parameter gets a nested offset optimization (exhaustive 3D scan, or
sequential per-axis line scans). Angle candidates resample the volume
and rebuild the summed-area table; size candidates reuse the current
table. Candidate evaluations are independent and run on a thread pool;
the reduction applies a total order (cost, then offset by (Vz,Vy,Vx),
then candidate rank) so results never depend on scheduling.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .integral import SummedAreaTable3D, build_sat, line_sums, offset_sums, region_sum, region_sum_bruteforce
from .metrics import MetricParams, ProposedParams, evaluate_region, region_costs_array
from .rotation import canonical_angles, rotation_matrix, rotate_labels
from .volume import EmptyMaskError, LabelVolume, centroid

logger = logging.getLogger(__name__)

# focused-parameter order within one outer iteration
_SWEEPS = (("size", 0), ("size", 1), ("size", 2), ("angle", 0), ("angle", 1), ("angle", 2))
_SWEEP_NAMES = ("Rx", "Ry", "Rz", "a1", "a2", "a3")


class ConfigError(ValueError):
    """Search configuration violates an invariant."""


@dataclass(frozen=True)
class SearchConfig:
    metric: MetricParams = field(default_factory=ProposedParams)
    size_min_mm: float = 5.0
    size_max_mm: float = 50.0
    size_step_mm: float = 1.0
    angle_candidates: int = 9
    angle_step_first_deg: float = 5.0
    angle_step_rest_deg: float = 5.0 / 9.0
    iterations: int = 2
    offset_mode: str = "full3d"  # or "line1d"
    computation: str = "sat"  # or "naive": per-offset brute-force sums (benchmark baseline)
    threads: int | None = None

    def __post_init__(self):
        if not isinstance(self.metric, MetricParams):
            raise ConfigError(f"metric must be ConventionalParams or ProposedParams, got {type(self.metric).__name__}")
        if not 0 < self.size_min_mm <= self.size_max_mm:
            raise ConfigError(f"need 0 < size_min_mm <= size_max_mm, got {self.size_min_mm}..{self.size_max_mm}")
        if self.size_step_mm <= 0:
            raise ConfigError("size_step_mm must be positive")
        if self.angle_candidates < 1 or self.angle_candidates % 2 == 0:
            raise ConfigError(f"angle_candidates must be odd and >= 1, got {self.angle_candidates}")
        if self.angle_step_first_deg <= 0 or self.angle_step_rest_deg <= 0:
            raise ConfigError("angle steps must be positive")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.offset_mode not in ("full3d", "line1d"):
            raise ConfigError(f"offset_mode must be 'full3d' or 'line1d', got {self.offset_mode!r}")
        if self.computation not in ("sat", "naive"):
            raise ConfigError(f"computation must be 'sat' or 'naive', got {self.computation!r}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        for t in self.metric.target_mm:
            if not self.size_min_mm <= t <= self.size_max_mm:
                raise ConfigError(
                    f"target size {self.metric.target_mm} outside size bounds "
                    f"[{self.size_min_mm}, {self.size_max_mm}]"
                )


@dataclass(frozen=True)
class RegionParams:
    offset_vox: tuple[int, int, int]  # (Vx, Vy, Vz) in the rotated frame
    size_vox: tuple[int, int, int]
    angles_deg: tuple[float, float, float]


@dataclass(frozen=True)
class Timings:
    sat_build_ms: float  # cumulative across all table builds (threads included)
    search_ms: float  # wall clock of the optimization loop
    total_ms: float


@dataclass(frozen=True)
class SearchResult:
    region: RegionParams
    size_mm: tuple[float, float, float]
    tumor_sum: int
    volume_mm3: float
    fraction: float
    cost: float
    world_corners_mm: np.ndarray  # (8, 3), x-low/high fastest bit
    evaluations: int
    cost_history: tuple[float, ...]  # best cost after init and after each sweep
    timings: Timings


def size_to_vox(size_mm, spacing_mm) -> tuple[int, int, int]:
    """Per-axis nearest voxel count, at least 1."""
    return tuple(max(1, int(round(r / s))) for r, s in zip(size_mm, spacing_mm))


def _best_from_sums(sums_zyx, size_mm, params, voxvol):
    """Minimum-cost offset over a (Kz, Ky, Kx) sums array.

    np.argmin takes the first minimum in C order, which is exactly the
    lexicographically smallest (Vz, Vy, Vx) tie-break.
    """
    costs = region_costs_array(sums_zyx, size_mm, params, voxvol)
    i = int(np.argmin(costs))
    vz, vy, vx = np.unravel_index(i, costs.shape)
    return (int(vx), int(vy), int(vz)), float(costs.flat[i]), int(sums_zyx.flat[i])


def _naive_full_sums(vol: LabelVolume, size_vox):
    from . import _kernels  # deferred: pulls in numba

    return _kernels.box_sums_full(vol.data, size_vox)


def _clamp_offset(v_init, size_vox, dims):
    return [min(max(int(c), 0), n - r) for c, r, n in zip(v_init, size_vox, dims)]


def _line1d_pass(size_vox, size_mm, params, voxvol, v_init, dims, sat=None, vol=None):
    """One x-then-y-then-z sequence of exhaustive line scans."""
    V = _clamp_offset(v_init, size_vox, dims)
    cost = tumor = None
    evals = 0
    for axis in (0, 1, 2):
        if sat is not None:
            sums = line_sums(sat, V, size_vox, axis)
        else:
            k = dims[axis] - size_vox[axis] + 1
            sums = np.empty(k, dtype=np.int64)
            probe = list(V)
            for i in range(k):
                probe[axis] = i
                sums[i] = region_sum_bruteforce(vol, probe, size_vox)
        costs = region_costs_array(sums, size_mm, params, voxvol)
        i = int(np.argmin(costs))  # first minimum: smallest coordinate
        V[axis] = i
        cost = float(costs[i])
        tumor = int(sums[i])
        evals += int(sums.size)
    return (V[0], V[1], V[2]), cost, tumor, evals


def optimize_offset_full3d(t: SummedAreaTable3D, size_vox, params: MetricParams):
    """Exhaustive offset search on a prebuilt table.

    Evaluates the cost at every valid offset and returns the minimum,
    ties broken toward the smallest (Vz, Vy, Vx).
    """
    size_mm = tuple(r * s for r, s in zip(size_vox, t.spacing_mm))
    voxvol = t.spacing_mm[0] * t.spacing_mm[1] * t.spacing_mm[2]
    sums = offset_sums(t, size_vox)
    off, cost, _ = _best_from_sums(sums, size_mm, params, voxvol)
    return off, cost


def optimize_offset_line1d(t: SummedAreaTable3D, size_vox, params: MetricParams, v_init):
    """Sequential exhaustive line searches along x, then y, then z,
    starting from v_init (clamped into bounds). One pass per call."""
    size_mm = tuple(r * s for r, s in zip(size_vox, t.spacing_mm))
    voxvol = t.spacing_mm[0] * t.spacing_mm[1] * t.spacing_mm[2]
    off, cost, _, _ = _line1d_pass(size_vox, size_mm, params, voxvol, v_init, t.dims, sat=t)
    return off, cost


def region_to_world(r: RegionParams, dims, spacing_mm) -> np.ndarray:
    """Corners of the region box in scanner-space millimeters.

    The box spans the physical extent of its voxels (half a voxel
    beyond the first/last voxel centers) in the rotated frame and is
    mapped out through the forward rotation about the volume center.
    Corner order: bit 0 of the corner index selects the high x face,
    bit 1 high y, bit 2 high z.
    """
    lo = np.array([(v - 0.5) * s for v, s in zip(r.offset_vox, spacing_mm)])
    hi = np.array([(v + n - 0.5) * s for v, n, s in zip(r.offset_vox, r.size_vox, spacing_mm)])
    corners = np.empty((8, 3))
    for k in range(8):
        for ax in range(3):
            corners[k, ax] = hi[ax] if (k >> ax) & 1 else lo[ax]
    ctr = np.array([(n - 1) / 2 * s for n, s in zip(dims, spacing_mm)])
    mat = rotation_matrix(r.angles_deg)
    return (mat @ (corners - ctr).T).T + ctr


class _Frame:
    """Current rotation state: resampled labels plus optional table."""

    __slots__ = ("vol", "sat", "build_ms")

    def __init__(self, source: LabelVolume, angles, computation: str):
        self.vol = rotate_labels(source, angles)
        self.sat = None
        self.build_ms = 0.0
        if computation == "sat" and self.vol.data.any():
            t0 = time.perf_counter()
            self.sat = build_sat(self.vol)
            self.build_ms = (time.perf_counter() - t0) * 1e3

    @property
    def has_tumor(self) -> bool:
        return bool(self.vol.data.any())


def _size_grid(cfg: SearchConfig):
    n = int(math.floor((cfg.size_max_mm - cfg.size_min_mm) / cfg.size_step_mm + 1e-9)) + 1
    return [cfg.size_min_mm + i * cfg.size_step_mm for i in range(n)]


def _center_out(n: int):
    """Candidate ranks 0..n-1 as offsets 0, -1, +1, -2, +2, ...

    Rank 0 is the sweep center (the current value), so exact cost ties
    keep the current angle instead of drifting to an arbitrary extreme.
    """
    ks = [0]
    for m in range(1, n // 2 + 1):
        ks.extend((-m, m))
    return ks


def search_region(v: LabelVolume, cfg: SearchConfig) -> SearchResult:
    """Run the full coordinate-descent search on a binary volume."""
    t_start = time.perf_counter()
    if not v.is_binary:
        raise ValueError("search requires a binary volume; run binarize() first")
    params = cfg.metric
    spacing = v.spacing_mm
    voxvol = v.voxel_volume_mm3
    dims = v.dims
    cen = centroid(v)  # raises EmptyMaskError on all-zero masks

    size_state = [float(cfg.size_min_mm)] * 3
    angle_state = [0.0, 0.0, 0.0]
    init_vox = size_to_vox(size_state, spacing)
    if any(r > n for r, n in zip(init_vox, dims)):
        raise ConfigError(f"minimum size {tuple(size_state)} mm does not fit into dims {dims}")

    threads = cfg.threads if cfg.threads is not None else (os.cpu_count() or 1)
    sat_ms = 0.0
    evaluations = 0

    frame = _Frame(v, angle_state, cfg.computation)
    sat_ms += frame.build_ms

    use_sat = cfg.computation == "sat"

    def run_offset(fr: _Frame, size_vox, v_init):
        size_mm = tuple(r * s for r, s in zip(size_vox, spacing))
        if cfg.offset_mode == "full3d":
            if use_sat:
                sums = offset_sums(fr.sat, size_vox)
            else:
                sums = _naive_full_sums(fr.vol, size_vox)
            off, cost, tumor = _best_from_sums(sums, size_mm, params, voxvol)
            return off, cost, tumor, int(sums.size)
        return _line1d_pass(
            size_vox, size_mm, params, voxvol, v_init, dims,
            sat=fr.sat if use_sat else None,
            vol=fr.vol,
        )

    t_loop = time.perf_counter()
    V = tuple(_clamp_offset([round(c) for c in cen], init_vox, dims))
    V, best_cost, best_sum, n_ev = run_offset(frame, init_vox, V)
    evaluations += n_ev
    cost_history = [best_cost]

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def parallel(fn, items):
        if pool is None or len(items) <= 1:
            return [fn(x) for x in items]
        return list(pool.map(fn, items))

    try:
        for it in range(cfg.iterations):
            iter_start_cost = best_cost
            angle_step = cfg.angle_step_first_deg if it == 0 else cfg.angle_step_rest_deg
            for sweep_idx, (kind, axis) in enumerate(_SWEEPS):
                if kind == "size":
                    cands = _size_grid(cfg)

                    def eval_size(rank_val, _axis=axis):
                        rank, val = rank_val
                        trial = list(size_state)
                        trial[_axis] = val
                        svox = size_to_vox(trial, spacing)
                        if any(r > n for r, n in zip(svox, dims)):
                            return None
                        off, cost, tumor, n_ev = run_offset(frame, svox, V)
                        return rank, val, off, cost, tumor, n_ev

                    results = parallel(eval_size, list(enumerate(cands)))
                    best = None
                    for res in results:
                        if res is None:
                            continue
                        rank, val, off, cost, tumor, n_ev = res
                        evaluations += n_ev
                        key = (cost, (off[2], off[1], off[0]), rank)
                        if best is None or key < best[0]:
                            best = (key, val, off, cost, tumor)
                    if best is not None:
                        _, val, off, cost, tumor = best
                        size_state[axis] = val
                        V, best_cost, best_sum = off, cost, tumor
                else:
                    center = angle_state[axis]
                    cands = [center + k * angle_step for k in _center_out(cfg.angle_candidates)]

                    def eval_angle(rank_val, _axis=axis):
                        rank, ang = rank_val
                        trial = list(angle_state)
                        trial[_axis] = ang
                        fr = _Frame(v, trial, cfg.computation)
                        if not fr.has_tumor:
                            return None
                        svox = size_to_vox(size_state, spacing)
                        off, cost, tumor, n_ev = run_offset(fr, svox, V)
                        return rank, ang, off, cost, tumor, n_ev, fr.build_ms

                    results = parallel(eval_angle, list(enumerate(cands)))
                    best = None
                    for res in results:
                        if res is None:
                            continue
                        rank, ang, off, cost, tumor, n_ev, build_ms = res
                        evaluations += n_ev
                        sat_ms += build_ms
                        key = (cost, (off[2], off[1], off[0]), rank)
                        if best is None or key < best[0]:
                            best = (key, ang, off, cost, tumor)
                    if best is not None:
                        _, ang, off, cost, tumor = best
                        if ang != angle_state[axis]:
                            angle_state[axis] = ang
                            frame = _Frame(v, angle_state, cfg.computation)
                            sat_ms += frame.build_ms
                        V, best_cost, best_sum = off, cost, tumor
                cost_history.append(best_cost)
                logger.debug(
                    "sweep %s: cost=%.6g size=%s angles=%s V=%s",
                    _SWEEP_NAMES[sweep_idx], best_cost, size_state, angle_state, V,
                )
            if best_cost == iter_start_cost:
                break  # full iteration brought no improvement
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    size_vox = size_to_vox(size_state, spacing)
    size_mm = tuple(r * s for r, s in zip(size_vox, spacing))
    if frame.sat is not None:
        tumor = region_sum(frame.sat, V, size_vox)
    else:
        tumor = region_sum_bruteforce(frame.vol, V, size_vox)
    final = evaluate_region(tumor, size_mm, params, voxvol)
    region = RegionParams(offset_vox=tuple(V), size_vox=size_vox, angles_deg=canonical_angles(angle_state))
    corners = region_to_world(region, dims, spacing)
    t_end = time.perf_counter()
    return SearchResult(
        region=region,
        size_mm=size_mm,
        tumor_sum=final.tumor_sum,
        volume_mm3=final.volume_mm3,
        fraction=final.fraction,
        cost=final.cost,
        world_corners_mm=corners,
        evaluations=evaluations,
        cost_history=tuple(cost_history),
        timings=Timings(
            sat_build_ms=sat_ms,
            search_ms=(t_end - t_loop) * 1e3,
            total_ms=(t_end - t_start) * 1e3,
        ),
    )
