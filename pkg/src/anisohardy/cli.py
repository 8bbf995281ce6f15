"""Command-line entry point: ``anisohardy run`` and ``anisohardy list``.

Exit status of ``run``: 0 when every check passes, 1 when any check fails
or a suite aborts, 2 for configuration and usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import SUITE_CHOICES, SUITES, default_config, load_config
from .errors import AnisoHardyError, ConfigError
from .report import CheckRow, ExperimentReport, write_csv
from .suites import CATALOG, SuiteContext, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anisohardy",
        description="Numerical verification of anisotropic Hardy-type inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run verification suites from a YAML configuration")
    run.add_argument("config", nargs="?", help="YAML configuration file (defaults when omitted)")
    run.add_argument("--suite", choices=SUITE_CHOICES, help="override the configured suite")
    run.add_argument("--plots", action="store_true", default=None,
                     help="write one SVG convergence plot per sharpness sweep")
    run.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    run.add_argument("--seed", type=int, metavar="K", help="random seed (overrides seed)")
    run.add_argument("-v", "--verbose", action="store_true", help="print every check row")

    lst = sub.add_parser("list", help="list the available suites")
    lst.add_argument("--json", action="store_true", help="machine-readable catalog")
    return parser


def catalog_entries():
    return [{"suite": s, "verifies": CATALOG[s]["verifies"], "params": CATALOG[s]["params"]}
            for s in SUITES]


def list_suites(as_json=False, stream=None):
    stream = stream or sys.stdout
    entries = catalog_entries()
    if as_json:
        json.dump({"suites": entries, "order": list(SUITES)}, stream, indent=2)
        stream.write("\n")
        return
    width = max(len(s) for s in SUITES)
    for e in entries:
        stream.write(f"{e['suite']:<{width}} -> {e['verifies']}\n")
        stream.write(f"{'':<{width}}    requires: {', '.join(e['params'])}\n")
    stream.write(f"{'all':<{width}} -> every suite above, in this order\n")


def _error_report(name, exc):
    rep = ExperimentReport(name)
    rep.add(CheckRow(f"aborted:{type(exc).__name__}", float("nan"), 0.0, "TRIVIAL", 0.0))
    rep.notes["error"] = str(exc)
    return rep


def run(cfg, verbose=False, stream=None, err=None):
    """Execute the configured suites and write their outputs.

    Returns ``(reports, exit_code)``.  Files: ``<out>/<csv>`` with every
    check row, ``<out>/manifest.json`` with the resolved configuration, its
    hash and timings, and one SVG per sweep when plots are enabled.
    """
    stream = stream or sys.stdout
    err = err or sys.stderr
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = SuiteContext(cfg)
    reports = []
    stream.write(f"config hash {cfg.hash}\n")
    for name in cfg.suites:
        try:
            rep = run_suite(name, cfg, ctx)
        except AnisoHardyError as exc:
            err.write(f"suite {name} aborted: {exc}\n")
            rep = _error_report(name, exc)
        reports.append(rep)
        failed = rep.failures()
        stream.write(f"{name}: {len(rep.rows)} checks, {len(failed)} failed, {rep.wall_time:.2f} s\n")
        lines = rep.summary_lines() if verbose else [
            line for line, r in zip(rep.summary_lines(), rep.rows) if not r.passed]
        for line in lines:
            stream.write(f"  {line}\n")
        stream.flush()

    csv_path = cfg.csv_path
    with open(csv_path, "w", newline="") as fh:
        write_csv(fh, reports)
    manifest = {
        "config_hash": cfg.hash,
        "config": cfg.raw,
        "suites": [{"suite": r.suite, "checks": len(r.rows), "failed": len(r.failures()),
                    "wall_time": r.wall_time} for r in reports],
        "passed": all(r.passed for r in reports),
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    if cfg.plots:
        from .plotting import write_sweep_plots
        for p in write_sweep_plots(reports, out_dir):
            stream.write(f"plot {p}\n")
    ok = all(r.passed for r in reports)
    stream.write(f"{'PASS' if ok else 'FAIL'}: results in {csv_path}\n")
    return reports, EXIT_OK if ok else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        list_suites(args.json)
        return EXIT_OK
    overrides = {"suite": args.suite, "seed": args.seed, "dir": args.out, "plots": args.plots}
    try:
        if args.config is None:
            cfg = default_config(**overrides)
        else:
            cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _, code = run(cfg, verbose=args.verbose)
    return code


if __name__ == "__main__":
    sys.exit(main())
