"""Command-line entry points.

    bbgky-lab run       --config cfg.json [--out DIR]   run the configured scenario
    bbgky-lab verify    --config cfg.json [--out DIR]   run the verification suite
    bbgky-lab meanfield --config cfg.json [--out DIR]   run the scaling ladder

Exit status is 0 exactly when every check row passes. BBGKY_LAB_THREADS
caps worker threads for independent cells.
"""

import argparse
import sys
from dataclasses import replace

from .config import load_config
from .verify import run_scenario


def _add_common(sub):
    sub.add_argument("--config", required=True, help="path to the JSON configuration")
    sub.add_argument("--out", default=None, help="directory for results.csv and report.json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bbgky-lab",
        description="correlation-operator hierarchy laboratory for finite qudit systems")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (("run", "run the scenario named in the configuration"),
                        ("verify", "run the full invariant suite"),
                        ("meanfield", "run the interaction-scaling ladder")):
        sub = subs.add_parser(name, help=blurb)
        _add_common(sub)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command == "verify":
        config = replace(config, scenario="verify")
    elif args.command == "meanfield":
        config = replace(config, scenario="meanfield")

    record = run_scenario(config, out_dir=args.out)

    for row in record.rows:
        status = "pass" if row.passed else "FAIL"
        print(f"[{status}] {row.name}  (measured {row.measured:.3e}, "
              f"limit {row.limit:.3e})")
    failures = [row for row in record.rows if not row.passed]
    print(f"{record.scenario}: {len(record.rows) - len(failures)}/"
          f"{len(record.rows)} checks passed in {record.wall_time:.1f}s "
          f"(kernels: {record.kernel_backend})")
    if failures:
        for row in failures:
            print(f"failed: {row.name} [{row.tag}]", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
