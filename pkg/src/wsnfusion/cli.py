"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error, 3 I/O error. Machine-readable JSON goes to stdout, diagnostics to
stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metrics, verify
from .config import load_config
from .errors import ConfigError
from .fusion import FusionModel
from .sim import run_simulation

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_config_args(p):
    p.add_argument("--config", type=Path, help="JSON config file (defaults used for missing keys)")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--override", action="append", default=[], metavar="K=V",
                   help="dotted config override, e.g. radio.e_fs=1e-11 (repeatable)")
    p.add_argument("--strict-radius", action="store_true",
                   help="orphan nodes with no cluster head within r_cluster")
    p.add_argument("--model-in", type=Path, help="load the fusion net from this JSON file")
    p.add_argument("--model-out", type=Path, help="save the fusion net to this JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wsnfusion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate the clustered network")
    _add_config_args(run)
    run.add_argument("--series", action="store_true", help="also write per-figure CSV series")

    cmp_ = sub.add_parser("compare", help="simulate proposed and direct-transmission baseline")
    _add_config_args(cmp_)
    cmp_.add_argument("--baseline-same", action="store_true",
                      help="debug: run the proposed protocol on both sides")

    gc = sub.add_parser("gradcheck", help="finite-difference check of backpropagation")
    gc.add_argument("--seed", type=int, default=0)
    gc.add_argument("--nets", type=int, default=50)

    mc = sub.add_parser("mstcheck", help="Prim vs exhaustive spanning-tree enumeration")
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--clusters", type=int, default=200)
    mc.add_argument("--min-size", type=int, default=4)
    mc.add_argument("--max-size", type=int, default=8)
    return parser


def _resolve_config(args):
    overrides = list(args.override)
    if args.strict_radius:
        overrides.append("strict_radius=true")
    return load_config(args.config, overrides, args.seed)


def _load_model(args):
    return FusionModel.load(args.model_in) if args.model_in else None


def _write_run(out: Path, result, prefix=""):
    metrics.write_rounds_csv(result.metrics, out / f"rounds{prefix}.csv")
    metrics.write_summary_json(result.summary, out / f"summary{prefix}.json")


def cmd_run(args) -> int:
    config = _resolve_config(args)
    model = _load_model(args)
    args.out.mkdir(parents=True, exist_ok=True)
    result = run_simulation(config, model=model)
    _write_run(args.out, result)
    (args.out / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    if args.series:
        metrics.write_figure_series(result.metrics, args.out)
    if args.model_out:
        result.model.save(args.model_out)
    print(json.dumps(result.summary.to_dict()))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _resolve_config(args)
    model = _load_model(args)
    args.out.mkdir(parents=True, exist_ok=True)
    proposed = run_simulation(config, model=model)
    if args.baseline_same:
        baseline = run_simulation(config, model=proposed.model)
    else:
        baseline = run_simulation(config, protocol="direct")
    _write_run(args.out, proposed, "_proposed")
    _write_run(args.out, baseline, "_baseline")
    report = metrics.compare_runs(proposed.summary, baseline.summary)
    (args.out / "comparison.json").write_text(json.dumps(report, indent=2) + "\n")
    if args.model_out:
        proposed.model.save(args.model_out)
    print(json.dumps(report))
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    report = verify.gradcheck(seed=args.seed, n_nets=args.nets)
    print(json.dumps({"max_rel_error": report.max_rel_error, "entries": report.entries, "ok": report.ok}))
    print(verify.format_report(report), file=sys.stderr)
    for f in report.failures[:10]:
        print(f"  net {f['net']} {f['param']}{f['index']}: analytic={f['analytic']!r} numeric={f['numeric']!r}",
              file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_mstcheck(args) -> int:
    if not 1 <= args.min_size <= args.max_size:
        raise ConfigError("need 1 <= --min-size <= --max-size")
    report = verify.mstcheck(seed=args.seed, n_clusters=args.clusters, sizes=(args.min_size, args.max_size))
    print(json.dumps({"clusters": report.clusters, "max_abs_error": report.max_abs_error, "ok": report.ok}))
    print(verify.format_report(report), file=sys.stderr)
    for f in report.failures[:10]:
        print(f"  cluster {f['cluster']} error={f['error']:.3e} points={f['points']}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "gradcheck": cmd_gradcheck, "mstcheck": cmd_mstcheck}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
