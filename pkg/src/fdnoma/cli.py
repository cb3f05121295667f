"""Command-line driver: ergodic-capacity sweeps, rate-region traces, and the
analytic single-user oracle.

Exit codes: 0 success, 2 for usage or validation problems, 1 for internal
errors. SNR and threshold flags are given in dB and converted to linear once
at this boundary; everything inside is linear.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import __version__
from .runio import (REGION_HEADER, SWEEP_HEADER, ConfigError, load_config,
                    parse_span, region_rows, sweep_rows, write_csv, write_manifest)
from .scenarios import SCENARIOS
from .scenarios.rayleigh import analytic_ergodic_capacity
from .scenarios.scbf import ScbfConfig
from .sweep import snr_sweep, tdm_region, trace_rate_region

RUN_SCENARIOS = ("uldl", "coop", "cognitive", "rayleigh")
REGION_SCENARIOS = ("cognitive", "scbf")
DEFAULT_REGION_SCHEMES = {"cognitive": "optimum,suboptimum", "scbf": "scbf"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdnoma",
                                     description="Full-duplex NOMA link-level simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="ergodic-capacity sweep over an SNR grid")
    run.add_argument("--scenario", required=True, choices=RUN_SCENARIOS)
    run.add_argument("--config", default=None, help="JSON config path")
    run.add_argument("--snr", required=True, help="start:stop:step in dB")
    run.add_argument("--modes", required=True, help="comma-separated mode list")
    run.add_argument("--trials", type=int, default=100000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="results.csv")

    region = sub.add_parser("region", help="achievable rate-region trace")
    region.add_argument("--scenario", required=True, choices=REGION_SCENARIOS)
    region.add_argument("--config", default=None)
    region.add_argument("--ith-db", type=float, default=None,
                        help="interference threshold at the primary receiver, dB")
    region.add_argument("--alpha", type=float, default=None,
                        help="weak-channel power attenuation factor")
    region.add_argument("--power-db", type=float, default=None,
                        help="total transmit SNR, dB")
    region.add_argument("--corr", type=float, default=None,
                        help="spatial correlation coefficient")
    region.add_argument("--schemes", default=None, help="comma-separated schemes")
    region.add_argument("--targets", default=None, help="start:stop:step in bits/s/Hz")
    region.add_argument("--trials", type=int, default=500)
    region.add_argument("--seed", type=int, default=0)
    region.add_argument("--out", default="region.csv")

    oracle = sub.add_parser("oracle", help="closed-form reference values")
    osub = oracle.add_subparsers(dest="oracle_kind", required=True)
    ray = osub.add_parser("rayleigh", help="single-user Rayleigh ergodic capacity")
    ray.add_argument("--snr-db", type=float, required=True)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.scenario, args.config)
    grid_db = parse_span(args.snr)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    if not modes:
        raise ConfigError("empty mode list")
    known = SCENARIOS[args.scenario].MODES
    for m in modes:
        if m not in known:
            raise ConfigError(f"unknown mode {m!r} for {args.scenario}; choose from {known}")
    if args.trials < 1:
        raise ConfigError("trials must be >= 1")
    result = snr_sweep(args.scenario, cfg, grid_db, modes, args.trials, args.seed)
    out = write_csv(args.out, SWEEP_HEADER, sweep_rows(result))
    write_manifest(out, scenario=args.scenario, cfg=cfg, seed=args.seed,
                   trials=args.trials, version=__version__,
                   command={"kind": "run", "snr": args.snr, "modes": modes})
    print(f"wrote {out}")
    return 0


def _cmd_region(args) -> int:
    if args.scenario == "cognitive":
        overrides = {}
        if args.ith_db is not None:
            overrides["i_th"] = 10.0 ** (args.ith_db / 10.0)
        cfg = load_config("cognitive", args.config, overrides)
        default_top = 4.0
    else:
        overrides = {}
        if args.alpha is not None:
            overrides["alpha"] = args.alpha
        if args.power_db is not None:
            overrides["p_total"] = 10.0 ** (args.power_db / 10.0)
        if args.corr is not None:
            overrides["rho_corr"] = args.corr
        cfg = load_config("scbf", args.config, overrides)
        _, (_, r2_cap) = tdm_region(cfg)
        default_top = r2_cap
    if args.targets is not None:
        targets = parse_span(args.targets)
    else:
        targets = [k * default_top / 19.0 for k in range(20)]
    schemes = [s.strip() for s in
               (args.schemes or DEFAULT_REGION_SCHEMES[args.scenario]).split(",") if s.strip()]
    rows: list[str] = []
    extras: dict = {}
    for scheme in schemes:
        if args.scenario == "cognitive":
            cfg_s = dataclasses.replace(cfg, scheme=scheme)
            points = trace_rate_region("cognitive", cfg_s, targets, args.trials, args.seed)
            ith = cfg_s.i_th
        else:
            if scheme != "scbf":
                raise ConfigError(f"unknown scbf scheme {scheme!r}")
            points = trace_rate_region("scbf", cfg, targets, args.trials, args.seed)
            ith = None
        rows.extend(region_rows(args.scenario, scheme, points, ith, args.trials, args.seed))
        clipped = [{"r2_target": p.r2_target, "raw_r1": p.raw_r1, "clipped": p.clipped}
                   for p in points if p.clipped]
        if clipped:
            extras.setdefault("isotonic_clips", {})[scheme] = clipped
    if args.scenario == "scbf":
        (x1, y1), (x2, y2) = tdm_region(cfg)
        for r2t, r1 in ((y1, x1), (y2, x2)):
            rows.append(",".join(["scbf", "tdm", _fmt(r2t), _fmt(r1), "true", "",
                                  str(args.trials), str(args.seed)]))
    out = write_csv(args.out, REGION_HEADER, rows)
    write_manifest(out, scenario=args.scenario, cfg=cfg, seed=args.seed,
                   trials=args.trials, version=__version__,
                   command={"kind": "region", "targets": targets, "schemes": schemes},
                   extras=extras or None)
    print(f"wrote {out}")
    return 0


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _cmd_oracle(args) -> int:
    snr = 10.0 ** (args.snr_db / 10.0)
    print(_fmt(analytic_ergodic_capacity(snr)))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "region":
            return _cmd_region(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
