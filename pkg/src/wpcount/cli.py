"""Command-line interface: validate, analyze, constant, volume, count, verify."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .asymptotics import leading_constant
from .enumeration import BudgetExceeded, CountOptions, EnumerationError, convergence_report, count_by_discrepancy
from .local import AnalysisError, global_analysis
from .morphism import MorphismError, load_config, validate_no_common_zero
from .volume import VolumeError, region_grid, volume_monte_carlo, volume_slice

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_ANALYSIS, EXIT_BUDGET = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2) + "\n"


def _csv_text(rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    for r in rows:
        wr.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _flat_rows(obj, prefix="") -> list:
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += _flat_rows(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            rows += _flat_rows(v, f"{prefix}{i}.")
    else:
        rows.append([prefix[:-1], obj])
    return rows


def _common(p):
    p.add_argument("--config", default=argparse.SUPPRESS, help="morphism config JSON (path or shipped fixture name)")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes for counting")
    p.add_argument("--out", default=argparse.SUPPRESS, help="directory for output files and the run manifest")
    p.add_argument("--format", choices=["json", "csv", "both"], default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wpcount", description=__doc__)
    _common(ap)
    ap.add_argument("--version", action="version", version=f"wpcount {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check degrees and the common-zero condition")
    _common(p)
    p = sub.add_parser("analyze", help="discrepancy set, bad primes, moduli, census, C_phi")
    _common(p)
    p = sub.add_parser("constant", help="leading constant of the asymptotic count")
    _common(p)
    p.add_argument("--grid", type=int, default=2048)
    p = sub.add_parser("volume", help="region volume")
    _common(p)
    p.add_argument("--method", choices=["slice", "mc", "both"], default="slice")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-region-grid", metavar="PATH", help="write region points of an N x N grid as CSV")
    p.add_argument("--dump-grid-size", type=int, default=200)
    p = sub.add_parser("count", help="exact N(T)")
    _common(p)
    p.add_argument("--T", required=True, help="height bound (exact decimal or p/q)")
    p.add_argument("--by-discrepancy", action="store_true")
    p.add_argument("--budget", type=int, default=50_000_000, help="max number of x1 values")
    p.add_argument("--checkpoint", help="JSON file for resumable slab partial sums")
    p.add_argument("--slab", type=int, default=2048)
    p.add_argument("--mode", choices=["fast", "scan"], default="fast")
    p.add_argument("--exclude-singular", action="store_true", help="X1(2) only: drop (a,0) and (a,3a^2/8)")
    p = sub.add_parser("verify", help="full pipeline and convergence report")
    _common(p)
    p.add_argument("--ladder", required=True, help="comma separated T values")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--budget", type=int, default=50_000_000)
    return ap


def _parse_T(s: str) -> Fraction:
    try:
        T = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid T {s!r}") from None
    if T <= 0:
        raise argparse.ArgumentTypeError("T must be positive")
    return T


def _cmd_validate(spec, args):
    res = validate_no_common_zero(spec)
    return {
        "name": spec.name,
        "valid": res.ok,
        "e": spec.e,
        "source_weights": list(spec.source.weights),
        "target_weights": list(spec.target.weights),
        "weighted_degrees": [f.degree for f in spec.polys],
        "common_zero_check": "pass" if res.ok else res.witness,
    }, None


def _cmd_analyze(spec, args):
    return global_analysis(spec).to_json(), None


def _prediction(spec, grid):
    ga = global_analysis(spec)
    vol = volume_slice(spec, grid)
    return ga, leading_constant(ga.c_phi, vol.value, spec), vol


def _cmd_constant(spec, args):
    _, pred, _ = _prediction(spec, args.grid)
    return pred.to_json(), None


def _cmd_volume(spec, args):
    out = {}
    if args.method in ("slice", "both"):
        r = volume_slice(spec, args.grid)
        out["slice"] = r.to_json()
    if args.method in ("mc", "both"):
        r = volume_monte_carlo(spec, args.samples, args.seed)
        out["mc"] = r.to_json()
    if args.dump_region_grid:
        pts = region_grid(spec, args.dump_grid_size)
        Path(args.dump_region_grid).write_text(_csv_text([["x1", "x2"]] + [list(p) for p in pts]))
        out["region_grid"] = {"path": args.dump_region_grid, "points": len(pts)}
    rows = [["method", "value", "error"]] + [[k, v["value"], v["error"]] for k, v in out.items() if k != "region_grid"]
    return out, rows


def _cmd_count(spec, args):
    T = _parse_T(args.T)
    ga = global_analysis(spec)
    opts = CountOptions(args.threads, args.budget, args.slab, args.checkpoint, args.mode, args.exclude_singular)
    parts = count_by_discrepancy(spec, ga, T, opts)
    total = sum(parts.values(), Fraction(0))
    out = {"T": str(T), "mass": str(total), "mass_float": float(total)}
    if args.by_discrepancy:
        out["by_discrepancy"] = {str(d): str(v) for d, v in sorted(parts.items())}
    rows = [["T", "d", "mass_num", "mass_den"]]
    for d, v in sorted(parts.items()):
        rows.append([str(T), str(d), v.numerator, v.denominator])
    return out, rows


def _cmd_verify(spec, args):
    ladder = [_parse_T(t.strip()) for t in args.ladder.split(",") if t.strip()]
    ga, pred, vol = _prediction(spec, args.grid)
    opts = CountOptions(threads=args.threads, budget=args.budget)
    rep = convergence_report(spec, ga, pred, ladder, opts)
    out = rep.to_json()
    out["analysis"] = ga.to_json()
    out["volume"] = vol.to_json()
    return out, rep.csv_rows()


COMMANDS = {
    "validate": _cmd_validate,
    "analyze": _cmd_analyze,
    "constant": _cmd_constant,
    "volume": _cmd_volume,
    "count": _cmd_count,
    "verify": _cmd_verify,
}


def _write_outputs(args, payload, rows, raw_config, t0) -> dict:
    fmt = args.format
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    digests = {}
    files = []
    if fmt in ("json", "both"):
        files.append((outdir / f"{args.cmd}.json", dumps(payload)))
    if fmt in ("csv", "both"):
        files.append((outdir / f"{args.cmd}.csv", _csv_text(rows or _flat_rows(_round(payload)))))
    for path, text in files:
        path.write_text(text)
        digests[path.name] = hashlib.sha256(text.encode()).hexdigest()
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "config")}
    manifest = {
        "tool_version": __version__,
        "config_sha256": hashlib.sha256(raw_config).hexdigest(),
        "config": str(args.config),
        "subcommand": args.cmd,
        "flags": {k: (v if isinstance(v, (int, float, str, bool)) or v is None else str(v)) for k, v in flags.items()},
        "seeds": [flags["seed"]] if "seed" in flags and args.cmd == "volume" and args.method != "slice" else [],
        "timing_seconds": round(time.perf_counter() - t0, 3),
        "output_sha256": digests,
    }
    (outdir / "manifest.json").write_text(dumps(manifest))
    return manifest


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    for k, v in (("config", None), ("threads", 1), ("out", None), ("format", "json")):
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.config is None:
        ap.error("--config is required")
    if args.threads < 1:
        ap.error("--threads must be >= 1")
    t0 = time.perf_counter()
    try:
        spec, raw = load_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MorphismError as exc:
        print(dumps({"valid": False, "condition": exc.condition, "error": str(exc), "witness": getattr(exc, "witness", None)}), end="")
        return EXIT_INVALID
    try:
        payload, rows = COMMANDS[args.cmd](spec, args)
    except argparse.ArgumentTypeError as exc:
        ap.error(str(exc))
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (AnalysisError, VolumeError, EnumerationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except MorphismError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "csv":
        sys.stdout.write(_csv_text(rows or _flat_rows(_round(payload))))
    else:
        sys.stdout.write(dumps(payload))
    if args.out:
        _write_outputs(args, payload, rows, raw, t0)
    if args.cmd == "validate" and not payload["valid"]:
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
