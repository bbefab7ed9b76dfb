"""Timing harness comparing computation and offset-search modes.

Four modes: c/p selects the conventional per-offset brute-force sums
or the precomputed-table sums, 1D/3D selects line or exhaustive offset
search. c and p modes differ only in how sums are computed, so their
results must be identical; only the clock moves.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, replace

from .search import SearchConfig, SearchResult, search_region
from .volume import LabelVolume

MODES = ("c1D", "p1D", "c3D", "p3D")

_MODE_CONFIG = {
    "c1D": {"computation": "naive", "offset_mode": "line1d"},
    "p1D": {"computation": "sat", "offset_mode": "line1d"},
    "c3D": {"computation": "naive", "offset_mode": "full3d"},
    "p3D": {"computation": "sat", "offset_mode": "full3d"},
}


@dataclass(frozen=True)
class BenchRow:
    mode: str
    sat_build_ms: float
    search_ms: float
    total_ms: float
    evaluations: int
    volume_mm3: float
    fraction: float
    cost: float
    result: SearchResult


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]
    dims: tuple[int, int, int]
    threads: int | None
    repeats: int


def run_bench(v: LabelVolume, cfg: SearchConfig, modes=MODES, repeats: int = 3) -> BenchReport:
    """Run search_region once per mode, timing each stage.

    Each mode is repeated ``repeats`` times and the per-stage medians
    are reported; the search outcome itself is deterministic across
    repeats.
    """
    unknown = [m for m in modes if m not in _MODE_CONFIG]
    if unknown:
        raise ValueError(f"unknown bench modes {unknown}; valid: {sorted(_MODE_CONFIG)}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    rows = []
    for mode in modes:
        mode_cfg = replace(cfg, **_MODE_CONFIG[mode])
        runs = [search_region(v, mode_cfg) for _ in range(repeats)]
        res = runs[0]
        rows.append(
            BenchRow(
                mode=mode,
                sat_build_ms=statistics.median(r.timings.sat_build_ms for r in runs),
                search_ms=statistics.median(r.timings.search_ms for r in runs),
                total_ms=statistics.median(r.timings.total_ms for r in runs),
                evaluations=res.evaluations,
                volume_mm3=res.volume_mm3,
                fraction=res.fraction,
                cost=res.cost,
                result=res,
            )
        )
    return BenchReport(rows=tuple(rows), dims=v.dims, threads=cfg.threads, repeats=repeats)


def report_to_csv(report: BenchReport) -> str:
    """Flat long-format CSV: one row per (mode, stage)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "stage", "ms", "evaluations", "volume_mm3", "fraction", "cost"])
    for row in report.rows:
        for stage, ms in (
            ("sat_build", row.sat_build_ms),
            ("search", row.search_ms),
            ("total", row.total_ms),
        ):
            w.writerow([row.mode, stage, f"{ms:.3f}", row.evaluations, f"{row.volume_mm3:.3f}",
                        f"{row.fraction:.6f}", f"{row.cost:.12g}"])
    return buf.getvalue()


def report_to_json(report: BenchReport) -> str:
    """Structured report; field order is fixed for diffability."""
    doc = {
        "dims": list(report.dims),
        "threads": report.threads,
        "repeats": report.repeats,
        "modes": [
            {
                "mode": row.mode,
                "result": {
                    "offset_vox": list(row.result.region.offset_vox),
                    "size_vox": list(row.result.region.size_vox),
                    "angles_deg": list(row.result.region.angles_deg),
                    "tumor_sum": row.result.tumor_sum,
                    "volume_mm3": row.volume_mm3,
                    "fraction": row.fraction,
                    "cost": row.cost,
                    "evaluations": row.evaluations,
                },
                "timings_ms": {
                    "sat_build": row.sat_build_ms,
                    "search": row.search_ms,
                    "total": row.total_ms,
                },
            }
            for row in report.rows
        ],
    }
    return json.dumps(doc, indent=2)
