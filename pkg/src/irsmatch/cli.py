"""Command-line entry point.

    irsmatch simulate --config scenario.cfg [--seed S] [--trials T]
                      [--sweep axis=v1,v2,...] [--algorithms a,b,c] [--out results.csv]
    irsmatch calibrate --config scenario.cfg --target 37.0 --out noise_db.txt

Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.
"""
import argparse
import logging
import sys
from pathlib import Path

from .config import PRESETS, ConfigError, coerce, load_config
from .harness import (
    SWEEP_AXES,
    CalibrationError,
    calibrate_noise,
    emit_csv,
    run_point,
    run_sweep,
    write_metadata,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def parse_sweep(text):
    """``"d_r=50,100"`` -> ``("d_r", [50.0, 100.0])``."""
    if "=" not in text:
        raise ConfigError(f"--sweep expects axis=v1,v2,..., got {text!r}")
    axis, _, raw = text.partition("=")
    axis = axis.strip()
    if axis not in SWEEP_AXES:
        raise ConfigError(f"cannot sweep {axis!r}; choose from {SWEEP_AXES}")
    values = [v.strip() for v in raw.split(",") if v.strip()]
    if not values:
        raise ConfigError("--sweep needs at least one value")
    kind = "n_elements" if axis in ("n_elements", "k_users") else axis
    return axis, [coerce(kind, v) for v in values]


def _base_config(args):
    if args.config:
        return load_config(args.config, PRESETS[args.preset])
    return PRESETS[args.preset]


def _overrides(cfg, args):
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "algorithms", None):
        changes["algorithms"] = coerce("algorithms", args.algorithms)
    if getattr(args, "noise_db", None) is not None:
        changes["noise_power_db"] = args.noise_db
    return cfg.replace(**changes) if changes else cfg


def cmd_simulate(args):
    cfg = _overrides(_base_config(args), args)
    if args.sweep:
        axis, values = parse_sweep(args.sweep)
        result = run_sweep(cfg, axis, values, workers=args.workers)
    else:
        axis, result = "", run_point(cfg, workers=args.workers)
    out = Path(args.out)
    emit_csv(result.rows, out)
    write_metadata(
        out.with_name(out.name + ".meta.txt"), cfg,
        {"sweep_axis": axis or "-", "redrawn_drops": result.redraws(), "rows": len(result.rows)},
    )
    for r in result.rows:
        print(f"{axis or 'point'}={r.axis_value!s:>8} {r.algorithm:>10}  {r.mean_sum_rate:8.3f} "
              f"+/- {r.std_error:.3f}  (non-converged {r.non_converged_count})")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_calibrate(args):
    cfg = _overrides(_base_config(args), args)
    try:
        res = calibrate_noise(cfg, args.target, d_r=args.d_r)
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        for noise_db, rate in exc.bracket:
            print(f"  noise {noise_db:.3f} dB -> mean proposed sum rate {rate:.3f}", file=sys.stderr)
        return EXIT_RUNTIME
    Path(args.out).write_text(f"{res.noise_power_db!r}\n", encoding="utf-8")
    print(f"noise_power_db = {res.noise_power_db:.4f} (mean proposed sum rate {res.achieved_sum_rate:.3f}, "
          f"target {res.target}, {res.evaluations} evaluations)")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="irsmatch", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value scenario file")
        p.add_argument("--preset", default="desk", choices=sorted(PRESETS), help="defaults under --config")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)

    sim = sub.add_parser("simulate", help="Monte-Carlo sum rates, optionally swept over one axis")
    common(sim)
    sim.add_argument("--sweep", help=f"axis=v1,v2,... with axis in {', '.join(SWEEP_AXES)}")
    sim.add_argument("--algorithms", help="comma-separated subset of proposed,gs_only,distance,random,exhaustive")
    sim.add_argument("--noise-db", type=float, dest="noise_db")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", default="results.csv")
    sim.set_defaults(func=cmd_simulate)

    cal = sub.add_parser("calibrate", help="find the noise power that yields a target mean sum rate")
    common(cal)
    cal.add_argument("--target", type=float, required=True, help="mean proposed sum rate, bits/s/Hz")
    cal.add_argument("--d-r", type=float, dest="d_r")
    cal.add_argument("--out", required=True, help="file receiving the calibrated noise power in dB")
    cal.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - top-level guard maps to the runtime exit code
        logging.getLogger(__name__).debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
