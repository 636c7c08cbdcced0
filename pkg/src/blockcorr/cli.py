"""Command-line front end.

Usage::

    blockcorr fig1 --config fig1.yaml --out results/
    blockcorr properties --out results/

Exit status is 0 on success, 1 when the configuration is invalid and 2 when
a property check fails.
"""

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

from . import experiments as X
from .errors import ValidationError
from .montecarlo import RealizationConfig, run_realization, write_series_csv

log = logging.getLogger("blockcorr")

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def write_rows(path, columns, rows, notes=()):
    with open(path, "w", newline="") as fh:
        for note in notes:
            fh.write(f"# {note}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def _load(args):
    data = {}
    if args.config:
        cfg = X.ExperimentConfig.from_file(args.config)
        data = {k: getattr(cfg, k) for k in X.ExperimentConfig.__dataclass_fields__}
    if args.seed is not None:
        data["seed"] = args.seed
    if args.ensemble is not None:
        data["ensemble"] = args.ensemble
    return X.ExperimentConfig.from_mapping(data)


def _notes(cfg, extra=()):
    return [f"seed={cfg.seed} ensemble={cfg.ensemble} c={cfg.c} N={cfg.N}", *extra]


def cmd_fig1(cfg, out, jobs):
    vp = ", ".join(_fmt(y) for y in cfg.probes(cfg.validation_points))
    path = out / "fig1.csv"
    write_rows(path, X.FIG1_COLUMNS, X.fig1_rows(cfg, jobs),
               _notes(cfg, [f"simulated at evenly spaced probes from boundary to centre: {vp}"]))
    return path, EXIT_OK


def cmd_fig2(cfg, out, jobs):
    path = out / "fig2.csv"
    write_rows(path, X.FIG2_COLUMNS, X.fig2_rows(cfg, jobs), _notes(cfg))
    return path, EXIT_OK


def cmd_fig3(cfg, out, jobs):
    sp = ", ".join(_fmt(y) for y in cfg.probes(cfg.spot_points))
    path = out / "fig3.csv"
    write_rows(path, X.FIG3_COLUMNS, X.fig3_rows(cfg, jobs),
               _notes(cfg, [f"M={_fmt(float(cfg.fig3_M))} spot checks ({cfg.spot_ensemble} realizations) at: {sp}"]))
    return path, EXIT_OK


def cmd_properties(cfg, out, jobs):
    rows = X.property_rows(cfg)
    path = out / "properties.csv"
    write_rows(path, X.PROPERTY_COLUMNS, rows)
    failed = [r for r in rows if not r["passed"]]
    for r in failed:
        log.error("property failed: %s (y_p=%s, lag=%s, value=%s)", r["check"], r["y_p"], r["lag"], r["value"])
    return path, EXIT_PROPERTY if failed else EXIT_OK


def cmd_displacement(cfg, out, jobs):
    path = out / f"displacement_N{cfg.N}_u{cfg.u}_M{_fmt(cfg.M)}_lag{cfg.lag}.csv"
    X.displacement_for(cfg).to_csv(path)
    return path, EXIT_OK


def cmd_simulate(cfg, out, jobs):
    net = cfg.network()
    rc = RealizationConfig(net, cfg.probes(cfg.points), burn_in=cfg.burn_in,
                           horizon=cfg.horizon, seed=cfg.seed)
    series = [run_realization(rc, r) for r in range(cfg.ensemble)]
    path = out / "series.csv"
    write_series_csv(path, series)
    return path, EXIT_OK


COMMANDS = {
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "properties": cmd_properties,
    "displacement": cmd_displacement,
    "simulate": cmd_simulate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="blockcorr", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="flat YAML key: value file")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--seed", type=int, help="override the seed in the config")
    parser.add_argument("--ensemble", type=int, help="number of Monte Carlo realizations")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
    except (ValidationError, OSError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    args.out.mkdir(parents=True, exist_ok=True)
    path, status = COMMANDS[args.command](cfg, args.out, args.jobs)
    print(path)
    return status


if __name__ == "__main__":
    sys.exit(main())
