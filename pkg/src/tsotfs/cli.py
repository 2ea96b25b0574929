"""Command line front end.

Subcommands:

- simulate: run the Monte Carlo sweep described by a TOML config and write
  the aggregate CSV;
- trial: run one end-to-end trial at a given SNR and seed, print the scores,
  optionally dump the channel estimate as JSON;
- selftest: run the built-in analytic checks.

Exit codes: 0 on success, 1 on a configuration problem, 2 when numerics
failed (selftest failure, a failed trial, or >10% failed trials in a sweep).
"""

from __future__ import annotations

import argparse
import sys

from .detector import write_estimate_json
from .errors import InvalidConfig, TsotfsError
from .harness import SweepSpec, load_config, run_sweep, run_trial, write_sweep_csv
from .selftest import run_selftest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsotfs",
        description="Grant-free NOMA-OTFS uplink: joint activity detection "
        "and channel estimation simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an SNR sweep and write a CSV")
    sim.add_argument("--config", required=True, help="TOML config file")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument(
        "--workers", type=int, default=None, help="override [sweep] workers"
    )

    tr = sub.add_parser("trial", help="run one end-to-end trial")
    tr.add_argument("--config", required=True, help="TOML config file")
    tr.add_argument("--snr", type=float, required=True, help="SNR in dB")
    tr.add_argument("--seed", type=int, default=0, help="trial seed (default 0)")
    tr.add_argument("--json", default=None, help="write the channel estimate here")

    sub.add_parser("selftest", help="run the built-in checks")
    return parser


def _cmd_simulate(args) -> int:
    cfg, spec = load_config(args.config)
    if args.workers is not None:
        if args.workers < 1:
            raise InvalidConfig("workers must be >= 1")
        spec = SweepSpec(
            cfg=spec.cfg,
            snr_grid_db=spec.snr_grid_db,
            trials=spec.trials,
            workers=args.workers,
            stop=spec.stop,
        )
    rows = run_sweep(spec)
    write_sweep_csv(rows, args.out)
    total = spec.trials * len(spec.snr_grid_db)
    failed = sum(row["failures"] for row in rows)
    print(f"wrote {args.out}: {len(rows)} SNR points, {total} trials, {failed} failed")
    return 2 if failed > 0.1 * total else 0


def _cmd_trial(args) -> int:
    cfg, _ = load_config(args.config)
    result, estimate = run_trial(cfg, args.snr, (args.seed,))
    print(f"snr_db          {result.snr_db:.9g}")
    print(f"aer             {result.aer:.9g}")
    print(f"nmse            {result.nmse:.9g}")
    print(f"nmse_oracle     {result.nmse_oracle:.9g}")
    print(f"detected_count  {result.detected_count}")
    print(f"runtime_ms      {result.runtime_ms:.3f}")
    if args.json is not None:
        write_estimate_json(estimate, args.json)
        print(f"wrote {args.json}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "trial":
            return _cmd_trial(args)
        return 0 if run_selftest() else 2
    except InvalidConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (TsotfsError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
