"""Command line entry point: ``run``, ``sweep`` and ``nulls`` subcommands."""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import harness, shd
from .acoustics import Medium


def _load_config(path):
    return harness.ExperimentConfig.from_json(Path(path).read_text())


def cmd_run(args):
    cfg = _load_config(args.config)
    if args.epochs:
        cfg = cfg.replace(epochs=args.epochs)
    report = harness.run_experiment(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    (out / "truth.csv").write_text(report.truth.to_csv())
    for method, res in report.results.items():
        if res.field is not None:
            (out / f"{method}.csv").write_text(res.field.to_csv())
    if report.history is not None:
        (out / "loss.csv").write_text(report.history.to_csv())
    for method, db in report.errors_db.items():
        status = f"{db:8.2f} dB" if db is not None else f"FAILED ({report.results[method].failure})"
        print(f"{method:10s} {status}")
    return 0


def cmd_sweep(args):
    cfg = _load_config(args.config)
    if args.epochs:
        cfg = cfg.replace(epochs=args.epochs)
    rows = harness.radius_sweep(cfg, harness.parse_radii(args.radii))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["radius", "error_db"])
    for r, db in rows:
        writer.writerow([f"{r:.6g}", f"{db:.4f}"])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["radius", "error_db"])
            w.writerows(rows)
    return 0


def cmd_nulls(args):
    medium = Medium(args.speed)
    U = args.order if args.order is not None else shd.order_budget(args.freq, args.radius, medium).U
    report = shd.detect_bessel_nulls(args.freq, args.radius, medium, U, args.threshold)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.format())
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="osmapinn", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run all configured reconstruction methods")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--epochs", type=int, help="override the training budget")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="pure-PINN error versus reconstruction radius")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--radii", default="0.02:0.005:0.08", help="start:step:stop or a,b,c (metres)")
    sweep.add_argument("--out", help="optional CSV output path")
    sweep.add_argument("--epochs", type=int)
    sweep.set_defaults(func=cmd_sweep)

    nulls = sub.add_parser("nulls", help="report spherical Bessel nulls for an array")
    nulls.add_argument("--freq", type=float, required=True)
    nulls.add_argument("--radius", type=float, required=True)
    nulls.add_argument("--order", type=int)
    nulls.add_argument("--threshold", type=float, default=shd.DEFAULT_NULL_THRESHOLD)
    nulls.add_argument("--speed", type=float, default=343.0)
    nulls.add_argument("--json", action="store_true")
    nulls.set_defaults(func=cmd_nulls)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
