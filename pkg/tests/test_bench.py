import math
import time

import numpy as np
import pytest

from voiplace.bench import MODES, report_to_csv, report_to_json, run_bench
from voiplace.metrics import ProposedParams
from voiplace.phantom import sphere_phantom
from voiplace.search import SearchConfig


@pytest.fixture(scope="module")
def small_report():
    v = sphere_phantom(16, 4.0)
    cfg = SearchConfig(
        metric=ProposedParams(target_mm=(4.0, 4.0, 4.0)),
        size_min_mm=4.0, size_max_mm=4.0,
        angle_candidates=1, iterations=1, threads=1,
    )
    return run_bench(v, cfg, modes=MODES, repeats=1)


def test_all_modes_present(small_report):
    assert [row.mode for row in small_report.rows] == list(MODES)


def test_c_and_p_results_identical(small_report):
    rows = {row.mode: row for row in small_report.rows}
    for c_mode, p_mode in (("c3D", "p3D"), ("c1D", "p1D")):
        c, p = rows[c_mode], rows[p_mode]
        assert c.result.region == p.result.region
        assert c.cost == p.cost
        assert c.result.tumor_sum == p.result.tumor_sum
        assert c.evaluations == p.evaluations


def test_evaluation_count_analytic(small_report):
    rows = {row.mode: row for row in small_report.rows}
    # 7 exhaustive scans (baseline + 6 single-candidate sweeps) over 13^3 offsets
    assert rows["p3D"].evaluations == 7 * 13**3
    # line mode: 3 axis scans of 13 offsets per optimizer call
    assert rows["p1D"].evaluations == 7 * 3 * 13


def test_naive_mode_reports_no_table_time(small_report):
    rows = {row.mode: row for row in small_report.rows}
    assert rows["c3D"].sat_build_ms == 0.0
    assert rows["p3D"].sat_build_ms > 0.0


def test_timings_non_negative(small_report):
    for row in small_report.rows:
        assert row.sat_build_ms >= 0 and row.search_ms >= 0 and row.total_ms >= 0


def test_csv_layout(small_report):
    lines = report_to_csv(small_report).strip().splitlines()
    assert lines[0] == "mode,stage,ms,evaluations,volume_mm3,fraction,cost"
    assert len(lines) == 1 + 3 * len(MODES)  # three stages per mode
    stages = [line.split(",")[1] for line in lines[1:4]]
    assert stages == ["sat_build", "search", "total"]


def test_json_structure(small_report):
    import json

    doc = json.loads(report_to_json(small_report))
    assert doc["dims"] == [16, 16, 16]
    assert [m["mode"] for m in doc["modes"]] == list(MODES)
    for m in doc["modes"]:
        assert set(m["timings_ms"]) == {"sat_build", "search", "total"}


def test_unknown_mode_rejected():
    v = sphere_phantom(8, 2.0)
    cfg = SearchConfig(metric=ProposedParams(target_mm=(2.0, 2.0, 2.0)),
                       size_min_mm=2.0, size_max_mm=2.0, angle_candidates=1, iterations=1)
    with pytest.raises(ValueError):
        run_bench(v, cfg, modes=("q5D",), repeats=1)


def test_bad_repeats_rejected():
    v = sphere_phantom(8, 2.0)
    cfg = SearchConfig(metric=ProposedParams(target_mm=(2.0, 2.0, 2.0)),
                       size_min_mm=2.0, size_max_mm=2.0, angle_candidates=1, iterations=1)
    with pytest.raises(ValueError):
        run_bench(v, cfg, modes=("p3D",), repeats=0)


def test_complexity_contrast_between_computations():
    # table-based scan time is independent of region volume; the naive
    # scan grows with offsets * region volume. Check log-log slopes
    # against those models with a +-30% margin.
    from voiplace._kernels import box_sums_full
    from voiplace.integral import build_sat, offset_sums

    n = 48
    rng = np.random.default_rng(0)
    v_data = (rng.random((n, n, n)) < 0.2).astype(np.uint8)
    from voiplace.volume import LabelVolume

    v = LabelVolume(dims=(n, n, n), spacing_mm=(1.0, 1.0, 1.0), data=v_data)
    t = build_sat(v)
    box_sums_full(np.zeros((4, 4, 4), np.uint8), (2, 2, 2))  # compile

    def med_time(fn, repeats=5):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return sorted(times)[repeats // 2]

    # naive side: hold the x extent (SIMD row length) fixed and grow the
    # region volume 16x, so time should track offsets * volume
    r1, r2 = (16, 4, 4), (16, 16, 16)
    k1 = (n - 16 + 1) * (n - 4 + 1) ** 2
    k2 = (n - 16 + 1) ** 3
    naive_ratio = med_time(lambda: box_sums_full(v.data, r2)) / med_time(lambda: box_sums_full(v.data, r1))
    work_ratio = (k2 * 16 * 16 * 16) / (k1 * 16 * 4 * 4)
    slope = math.log(naive_ratio) / math.log(work_ratio)
    assert 0.7 <= slope <= 1.3, f"naive scan slope {slope:.2f} vs work model"

    # table side: per-offset cost is constant, so time tracks the offset
    # count alone even though the region volume grows 216x
    s1, s2 = (24, 24, 24), (4, 4, 4)
    j1 = (n - 24 + 1) ** 3
    j2 = (n - 4 + 1) ** 3
    sat_ratio = med_time(lambda: offset_sums(t, s2)) / med_time(lambda: offset_sums(t, s1))
    sat_slope = math.log(sat_ratio) / math.log(j2 / j1)
    assert 0.5 <= sat_slope <= 1.5, f"table scan slope {sat_slope:.2f} vs offset-count model"


def test_repeats_keep_results_stable():
    v = sphere_phantom(12, 3.0)
    cfg = SearchConfig(metric=ProposedParams(target_mm=(3.0, 3.0, 3.0)),
                       size_min_mm=3.0, size_max_mm=3.0, angle_candidates=1, iterations=1, threads=2)
    a = run_bench(v, cfg, modes=("p3D",), repeats=3)
    b = run_bench(v, cfg, modes=("p3D",), repeats=1)
    assert a.rows[0].result.region == b.rows[0].result.region
    assert a.rows[0].cost == b.rows[0].cost
