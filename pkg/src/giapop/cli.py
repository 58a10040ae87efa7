"""Command-line surface: simulate, check, mc, compare, equilibrium."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, fields
from pathlib import Path

from .analysis import (UncertaintyRanges, compare_experiment, monte_carlo,
                       time_to_fraction)
from .config import (DEFAULT_CONFIG, RunManifest, config_hash, parse_config,
                     tool_version, write_manifest)
from .csvio import read_counts_csv, read_trajectory_csv, write_trajectory_csv
from .errors import NumericError, ValidationError
from .model import open_loop_equilibrium
from .sim import check_envelope, check_observer_bound, simulate

_STRATEGY_ALIASES = {"open-loop": "zero", "constant": "constant",
                     "adaptive": "adaptive"}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract wants usage + exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _split_strategy(arg: str | None) -> tuple[str | None, str | None]:
    """Map a --strategy flag to (internal strategy, schedule path)."""
    if arg is None:
        return None, None
    if arg in _STRATEGY_ALIASES:
        return _STRATEGY_ALIASES[arg], None
    if arg.startswith("schedule:"):
        path = arg[len("schedule:"):]
        if not path:
            raise ValidationError("schedule strategy needs a file: schedule:<file>")
        return "schedule", path
    raise ValidationError(
        f"unknown strategy {arg!r}; expected open-loop, constant, adaptive, "
        f"or schedule:<file>")


def _build_parser() -> _Parser:
    p = _Parser(prog="giapop",
                description="Trophozoite population simulator with certified "
                            "decay envelopes and norm-observer dosing.")
    sub = p.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="run one closed- or open-loop simulation")
    sim.add_argument("--config", default=str(DEFAULT_CONFIG))
    sim.add_argument("--strategy", default=None,
                     help="open-loop | constant | adaptive | schedule:<file>")
    sim.add_argument("--profile", choices=("paper", "theorem"), default=None)
    sim.add_argument("--out", default=".")
    sim.add_argument("--strict-gains", action="store_true",
                     help="treat observer gain warnings as errors")

    chk = sub.add_parser("check", help="run inequality checkers on a trajectory CSV")
    chk.add_argument("--traj", required=True)
    chk.add_argument("--config", default=str(DEFAULT_CONFIG))
    chk.add_argument("--delta", type=float, default=None,
                     help="decay rate to check against (default: config's)")

    mc = sub.add_parser("mc", help="Monte Carlo sweep over parameter ranges")
    mc.add_argument("--config", default=str(DEFAULT_CONFIG))
    mc.add_argument("--n", type=int, default=100)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--ranges", default=None,
                    help="JSON file {param: [low, high]}; default: config's ranges")
    mc.add_argument("--out", default=None)

    cmp_ = sub.add_parser("compare", help="align observed counts with a trajectory")
    cmp_.add_argument("--traj", required=True)
    cmp_.add_argument("--data", required=True)

    eq = sub.add_parser("equilibrium", help="print the zero-dose fixed point")
    eq.add_argument("--config", default=str(DEFAULT_CONFIG))
    return p


def _cmd_simulate(args) -> int:
    strategy, sched = _split_strategy(args.strategy)
    cfg = parse_config(args.config, strategy=strategy, profile=args.profile,
                       schedule_csv=sched)
    traj = simulate(cfg.model, cfg.observer, cfg.controller, cfg.sim,
                    strict_gains=args.strict_gains)
    for w in traj.warnings:
        print(f"warning: {w}", file=sys.stderr)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    name = f"trajectory_{cfg.controller.strategy}_{cfg.sim.profile}.csv"
    write_trajectory_csv(traj, outdir / name)
    write_manifest(RunManifest(
        config_path=str(args.config), profile=cfg.sim.profile,
        warnings=traj.warnings, outputs=(name,),
        tool_version=tool_version(), config_hash=config_hash(args.config),
    ), outdir / "manifest.json")

    final = traj.record(len(traj) - 1)
    print(f"wrote {outdir / name}")
    print(f"final population {final.x1:.6g} cells/ml at t={final.t:g} h "
          f"({traj.clamp_events} roundoff clamps)")
    t10 = time_to_fraction(traj, 0.10)
    if t10 is not None:
        print(f"population reached 10% of start at t={t10:.4g} h")
    return 0


def _cmd_check(args) -> int:
    cfg = parse_config(args.config)
    traj = read_trajectory_csv(args.traj)
    if len(traj) == 0:
        raise ValidationError(f"{args.traj} holds no samples")
    delta = args.delta if args.delta is not None else cfg.controller.envelope_delta
    if delta is None:
        raise ValidationError(
            "no decay rate to check against: pass --delta or use a config "
            "whose strategy claims one")
    y0 = float(traj.x1[0])
    env = check_envelope(traj, y0, delta)
    obs = check_observer_bound(traj, cfg.observer.lam,
                               (cfg.sim.mutation_bound_0, abs(cfg.sim.x2_hat_0)))
    print(f"envelope (delta={delta:g}): {len(env)} violation(s) over {len(traj)} samples")
    for t, y, bound in env[:3]:
        print(f"  t={t:g} h: y={y:.6g} > bound={bound:.6g}")
    print(f"observer bound: {len(obs)} violation(s) over {len(traj)} samples")
    for t, a, bound in obs[:3]:
        print(f"  t={t:g} h: |x2|={a:.6g} > bound={bound:.6g}")
    return 0 if not env and not obs else 1


def _load_ranges_file(path) -> UncertaintyRanges:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"ranges file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"ranges parse error at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ValidationError("ranges file must be a JSON object")
    names = [f.name for f in fields(UncertaintyRanges)]
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ValidationError(
            f"unknown keys in ranges file: {', '.join(unknown)}")
    missing = sorted(set(names) - set(data))
    if missing:
        raise ValidationError(
            f"ranges file is missing required keys: {', '.join(missing)}")
    parsed = {}
    for k in names:
        v = data[k]
        if (not isinstance(v, list) or len(v) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float))
                       for x in v)):
            raise ValidationError(
                f"ranges.{k} must be a [low, high] number pair")
        parsed[k] = (float(v[0]), float(v[1]))
    return UncertaintyRanges(**parsed)


def _cmd_mc(args) -> int:
    cfg = parse_config(args.config)
    if cfg.controller.strategy != "adaptive":
        raise ValidationError("mc needs a config with an adaptive controller")
    if args.ranges is not None:
        ranges = _load_ranges_file(args.ranges)
    elif cfg.ranges is not None:
        ranges = cfg.ranges
    else:
        raise ValidationError(
            "no uncertainty ranges: pass --ranges or add a ranges section "
            "to the config")
    summary = monte_carlo(ranges, cfg.controller.adaptive, cfg.observer,
                          cfg.sim, args.n, args.seed)
    print(f"runs: {summary.n_runs}  seed: {summary.seed}  "
          f"certified design: {summary.certified}")
    print(f"zero-violation fraction: {summary.zero_violation_fraction:.3f}")
    if math.isnan(summary.t10_median):
        print("time to 10%: never reached in any run")
    else:
        print(f"time to 10% (h): min {summary.t10_min:.4g}  "
              f"median {summary.t10_median:.4g}  max {summary.t10_max:.4g}  "
              f"({summary.t10_not_reached} run(s) not reached)")
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "mc_summary.json", "w", newline="") as f:
            json.dump(asdict(summary), f, indent=2)
            f.write("\n")
        print(f"wrote {outdir / 'mc_summary.json'}")
    return 0


def _cmd_compare(args) -> int:
    traj = read_trajectory_csv(args.traj)
    data = read_counts_csv(args.data)
    rows = compare_experiment(traj, data)
    print("t_hours,simulated,observed,log10_ratio")
    for row in rows:
        print("%.8e,%.8e,%.8e,%.8e" % row)
    return 0


def _cmd_equilibrium(args) -> int:
    cfg = parse_config(args.config)
    x1_star, x2_star = open_loop_equilibrium(cfg.model)
    peak = math.sqrt(cfg.model.w_m / 2.0)
    print(f"x1_star = {x1_star:.9g} cells/ml (carrying capacity)")
    print(f"x2_star = {x2_star:.9g}")
    print(f"note: the flux-peak abscissa sqrt(w_m/2) = {peak:.9g} is not the "
          f"fixed point; the Gaussian factor at the root is "
          f"{x2_star / peak:.4g}, not 1")
    return 0


_HANDLERS = {"simulate": _cmd_simulate, "check": _cmd_check, "mc": _cmd_mc,
             "compare": _cmd_compare, "equilibrium": _cmd_equilibrium}


def cli_dispatch(argv: list[str]) -> int:
    """Parse argv and run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.cmd](args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
