"""Command-line entry point: ``relaymon {single,sweep-power,sweep-position}``.

Exit status is 0 on success, 2 on configuration errors and 3 when any trial
hit a numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import experiment as ex
from .channel import distances, sample_fading, trial_rng
from .eavesdrop_first import solve as solve_eavesdrop_first
from .jam_first import solve as solve_jam_first

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("scenario")
    g.add_argument("--config", metavar="FILE", help="key = value file; flags override it")
    g.add_argument("--ps-dbm", help="source power (dBm)")
    g.add_argument("--pr-dbm", help="relay power (dBm)")
    g.add_argument("--p-dbm", help="monitor power budget (dBm)")
    g.add_argument("--noise-dbm-hz", help="noise density (dBm/Hz)")
    g.add_argument("--bandwidth-hz", help="bandwidth (Hz)")
    g.add_argument("--n0-w", help="noise power override (W)")
    g.add_argument("--carrier-hz", help="carrier frequency for the fspl model (Hz)")
    g.add_argument("--pathloss", help="fspl: free-space gain at 1 km times d^-tau; plain: d^-tau")
    g.add_argument("--tau", help="path-loss exponent (>= 2)")
    g.add_argument("--n", help="relay antennas")
    g.add_argument("--m", help="monitor antennas")
    for node in "srde":
        g.add_argument(f"--pos-{node}", metavar="X,Y", help=f"position of {node.upper()} (km)")
    g.add_argument("--trials", help="Monte-Carlo trials per grid point")
    g.add_argument("--seed", help="master seed")
    g.add_argument("--schemes", help="comma list from s1,s2,ee,ej")
    o = p.add_argument_group("output")
    o.add_argument("--out", metavar="FILE", help="CSV output path (stdout summary if omitted)")
    o.add_argument("--raw", action="store_true", help="write one row per trial instead of the summary")
    o.add_argument("--workers", type=int, default=1, help="worker processes")
    o.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaymon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    single = sub.add_parser("single", help="solve one channel realization and dump the details")
    single.add_argument("--trial", type=int, default=0, help="trial index of the realization")
    power = sub.add_parser("sweep-power", help="sweep the monitor power budget")
    power.add_argument("--p-dbm-min")
    power.add_argument("--p-dbm-max")
    power.add_argument("--p-dbm-step")
    pos = sub.add_parser("sweep-position", help="sweep the monitor x coordinate")
    pos.add_argument("--ex-min")
    pos.add_argument("--ex-max")
    pos.add_argument("--ex-step")
    pos.add_argument("--ey")
    for p in (single, power, pos):
        _common(p)
    return parser


NON_CONFIG = {"command", "config", "out", "raw", "workers", "verbose", "trial"}
KINDS = {"single": "single", "sweep-power": "power", "sweep-position": "position"}


def _dump_single(config: ex.ExperimentConfig, trial: int, out=None):
    out = out or sys.stdout
    params, topo = config.point(config.p_dbm)
    ch = sample_fading(params, trial_rng(config.seed, trial), distances(topo))
    np.set_printoptions(precision=6, linewidth=100)
    pr = lambda *a: print(*a, file=out)
    pr(f"trial {trial}, seed {config.seed}")
    pr(f"params: {params}")
    pr(f"carrier_hz: {config.carrier_hz:g} (pathloss={config.pathloss}, ref_gain={params.ref_gain:.6g})")
    pr("distances_km: " + ", ".join(f"d{i + 1}={d:.6g}" for i, d in enumerate(ch.d)))
    s1 = solve_jam_first(ch, params)
    pr("strategy1:")
    pr("  thetas: " + ", ".join(f"T{i + 1}={t:.6g}" for i, t in enumerate(s1.thetas.as_tuple())))
    pr(f"  f_max={s1.f_max:.9g} f_min={s1.f_min:.9g} case={s1.case_id.value} scale={s1.scale:.9g}")
    pr(f"  w={s1.w} ||w||^2={s1.outcome.power_used_w:.9g}")
    pr(f"  gammas={s1.outcome.gammas} rate={s1.outcome.rate:.9g}")
    s2 = solve_eavesdrop_first(ch, params)
    pr("strategy2:")
    pr(f"  branch={s2.branch.value} pe_w={s2.pe_w:.9g}")
    pr(f"  gammas={s2.outcome.gammas} rate={s2.outcome.rate:.9g}")


def _print_summary(rows, out=None):
    out = out or sys.stdout
    print(",".join(ex.SUMMARY_HEADER), file=out)
    for r in rows:
        print(",".join(r.row()), file=out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    kind = KINDS[args.command]
    values = {k: v for k, v in vars(args).items() if k not in NON_CONFIG}
    try:
        config = ex.parse_config(values, args.config, kind=kind)
        if args.workers < 1:
            raise ex.ConfigError("workers must be >= 1")
    except ex.ConfigError as exc:
        print(f"relaymon: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if kind == "single":
        _dump_single(config, args.trial)
        records = ex.run_point(config, config.p_dbm, args.trial)
    else:
        records = ex.run_records(config, workers=args.workers)

    rows = records if args.raw else ex.summarize(records)
    if args.out:
        try:
            ex.write_csv(rows, args.out, raw=args.raw)
        except OSError as exc:
            print(f"relaymon: {exc}", file=sys.stderr)
            return 1
    elif args.raw:
        print(",".join(ex.RAW_HEADER))
        for r in rows:
            print(",".join(r.row()))
    else:
        _print_summary(rows)

    failures = sum(r.failed for r in records)
    if failures:
        print(f"relaymon: {failures} trial(s) failed numerically", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
