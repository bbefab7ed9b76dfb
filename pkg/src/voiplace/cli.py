"""Command-line interface: search, phantom, bench, verify-sat.

Exit codes: 0 success, 1 I/O failure, 2 empty tumor mask, 3 invalid
flags or file contents.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import MODES, report_to_csv, report_to_json, run_bench
from .integral import build_sat, region_sum, region_sum_bruteforce
from .metrics import ConventionalParams, ProposedParams
from .phantom import PhantomBoundsError, load_phantom_spec, make_phantom
from .search import ConfigError, SearchConfig, search_region
from .volume import (
    EmptyMaskError,
    HeaderError,
    PayloadMismatchError,
    binarize,
    load_volume,
    save_volume,
    total_tumor,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_EMPTY_MASK = 2
EXIT_VALIDATION = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; remap to the validation code
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _parse_triple(text, kind=float):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(kind(p) for p in parts)


def _parse_labels(text):
    if text.strip() == "":
        return frozenset()
    return frozenset(int(p) for p in text.split(","))


def _add_search_flags(p):
    p.add_argument("--metric", choices=("conventional", "proposed"), default="proposed")
    p.add_argument("--target-size", type=lambda s: _parse_triple(s, float), default=(20.0, 20.0, 20.0),
                   metavar="LX,LY,LZ", help="target region size in mm (default 20,20,20)")
    p.add_argument("--f-target", type=float, default=0.9, help="target tumor fraction (default 0.9)")
    p.add_argument("--lambda1", type=float, default=1e-6, help="conventional volume weight (default 1e-6)")
    p.add_argument("--lambda2", type=float, default=0.01, help="per-axis shape weight (default 0.01)")
    p.add_argument("--beta", type=float, default=0.1, help="leaky slope for overshoot (default 0.1)")
    p.add_argument("--size-min", type=float, default=5.0, help="minimum size per axis in mm (default 5)")
    p.add_argument("--size-max", type=float, default=50.0, help="maximum size per axis in mm (default 50)")
    p.add_argument("--size-step", type=float, default=1.0, help="size candidate step in mm (default 1)")
    p.add_argument("--angle-candidates", type=int, default=9, help="candidates per angle sweep (default 9)")
    p.add_argument("--angle-step1", type=float, default=5.0, help="angle step in iteration 1, degrees")
    p.add_argument("--angle-step2", type=float, default=5.0 / 9.0, help="angle step afterwards, degrees")
    p.add_argument("--iterations", type=int, default=2, help="outer iterations (default 2)")
    p.add_argument("--offset-mode", choices=("full3d", "line1d"), default="full3d")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--tumor-labels", type=_parse_labels, default=frozenset({1, 2, 4}),
                   metavar="L1,L2,...", help="label values binarized to tumor (default 1,2,4)")


def _config_from_args(args) -> SearchConfig:
    if args.metric == "proposed":
        params = ProposedParams(target_mm=args.target_size, f_target=args.f_target,
                                lambda2=args.lambda2, beta=args.beta)
    else:
        params = ConventionalParams(target_mm=args.target_size, f_target=args.f_target,
                                    lambda1=args.lambda1)
    return SearchConfig(
        metric=params,
        size_min_mm=args.size_min,
        size_max_mm=args.size_max,
        size_step_mm=args.size_step,
        angle_candidates=args.angle_candidates,
        angle_step_first_deg=args.angle_step1,
        angle_step_rest_deg=args.angle_step2,
        iterations=args.iterations,
        offset_mode=args.offset_mode,
        threads=args.threads,
    )


def _result_document(result):
    return {
        "region": {
            "offset_vox": list(result.region.offset_vox),
            "size_vox": list(result.region.size_vox),
            "size_mm": list(result.size_mm),
            "angles_deg": list(result.region.angles_deg),
        },
        "tumor_sum": result.tumor_sum,
        "volume_mm3": result.volume_mm3,
        "fraction": result.fraction,
        "cost": result.cost,
        "world_corners_mm": [list(map(float, c)) for c in result.world_corners_mm],
        "evaluations": result.evaluations,
        "cost_history": list(result.cost_history),
        "timings_ms": {
            "sat_build": result.timings.sat_build_ms,
            "search": result.timings.search_ms,
            "total": result.timings.total_ms,
        },
    }


def _emit(text, out_path):
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        print(text)


def cmd_search(args) -> int:
    vol = binarize(load_volume(args.input), args.tumor_labels)
    result = search_region(vol, _config_from_args(args))
    _emit(json.dumps(_result_document(result), indent=2), args.out)
    return EXIT_OK


def cmd_phantom(args) -> int:
    spec = load_phantom_spec(args.spec)
    vol = make_phantom(spec)
    save_volume(vol, args.out)
    print(f"total_tumor {total_tumor(vol)}")
    return EXIT_OK


def cmd_verify_sat(args) -> int:
    vol = binarize(load_volume(args.input), args.tumor_labels)
    sat = build_sat(vol)
    rng = np.random.default_rng(args.seed)
    nx, ny, nz = vol.dims
    mismatches = 0
    for _ in range(args.samples):
        size = tuple(int(rng.integers(1, n + 1)) for n in (nx, ny, nz))
        offset = tuple(int(rng.integers(0, n - r + 1)) for n, r in zip((nx, ny, nz), size))
        if region_sum(sat, offset, size) != region_sum_bruteforce(vol, offset, size):
            mismatches += 1
    print(f"verify-sat: {args.samples - mismatches}/{args.samples} matches, {mismatches} mismatches")
    return EXIT_OK if mismatches == 0 else EXIT_VALIDATION


def cmd_bench(args) -> int:
    vol = binarize(load_volume(args.input), args.tumor_labels)
    modes = tuple(args.modes.split(","))
    report = run_bench(vol, _config_from_args(args), modes=modes, repeats=args.repeats)
    if args.format == "csv":
        _emit(report_to_csv(report), args.out)
    else:
        _emit(report_to_json(report), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="voiplace", description="Oriented VOI search in 3D binary tumor masks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[], help="find the best region in a label volume")
    p.add_argument("--input", required=True, help="volume header file")
    p.add_argument("--out", default=None, help="write result JSON here instead of stdout")
    _add_search_flags(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("phantom", help="generate a synthetic label volume")
    p.add_argument("--spec", required=True, help="phantom spec JSON file")
    p.add_argument("--out", required=True, help="output volume header path")
    p.set_defaults(fn=cmd_phantom)

    p = sub.add_parser("verify-sat", help="compare table sums against brute force on random regions")
    p.add_argument("--input", required=True, help="volume header file")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tumor-labels", type=_parse_labels, default=frozenset({1, 2, 4}))
    p.set_defaults(fn=cmd_verify_sat)

    p = sub.add_parser("bench", help="time the computation/search mode matrix")
    p.add_argument("--input", required=True, help="volume header file")
    p.add_argument("--out", default=None)
    p.add_argument("--modes", default=",".join(MODES), help=f"comma list from {MODES}")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_search_flags(p)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except EmptyMaskError as exc:
        print(f"voiplace: empty mask: {exc}", file=sys.stderr)
        return EXIT_EMPTY_MASK
    except (HeaderError, PayloadMismatchError) as exc:
        print(f"voiplace: unreadable volume: {exc}", file=sys.stderr)
        return EXIT_IO
    except FileNotFoundError as exc:
        print(f"voiplace: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"voiplace: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, PhantomBoundsError, ValueError) as exc:
        print(f"voiplace: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
