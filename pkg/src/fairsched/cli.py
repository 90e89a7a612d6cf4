"""Command-line interface: static fills, trial statistics, online runs."""

import argparse
import sys
from pathlib import Path

from .criteria import CriterionKind
from .engine import SchedulerConfig, ServerPolicy, TieBreak, progressive_fill
from .model import ConfigurationError
from .onlinesim import Mode, ReleaseMode, SimConfig, builtin_scenarios, simulate
from .report import (format_fill, format_summary, plot_utilization,
                     write_fill_csv, write_trace_csvs)
from .scenario import bundled_scenario_path, load_scenario
from .trials import run_trials

EXIT_RUNTIME = 1
EXIT_INPUT = 2


def _resolve_scenario(name_or_path: str):
    presets = builtin_scenarios()
    if name_or_path.upper() in presets:
        return presets[name_or_path.upper()]
    path = Path(name_or_path)
    if not path.exists() and path.name == name_or_path:
        try:
            path = bundled_scenario_path(name_or_path)
        except ConfigurationError:
            raise ConfigurationError(
                f"unknown scenario {name_or_path!r}; presets: "
                + ", ".join(sorted(presets)))
    return load_scenario(path)


def _scheduler(args) -> SchedulerConfig:
    return SchedulerConfig(
        criterion=CriterionKind(args.scheduler),
        policy=ServerPolicy(args.policy),
        tie_break=(TieBreak.SEEDED_RANDOM if args.tie_break == "random"
                   else TieBreak.LOWEST_INDEX),
        seed=args.seed,
    )


def cmd_static(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    result = progressive_fill(scenario.cluster_state(), _scheduler(args))
    print(format_fill(result, scenario))
    if args.csv:
        write_fill_csv(result, scenario, args.csv)
    return 0


def cmd_trials(args) -> int:
    if args.trials < 1:
        raise ConfigurationError("--trials must be at least 1")
    scenario = _resolve_scenario(args.scenario)
    summary = run_trials(scenario.cluster_state(), _scheduler(args),
                         trials=args.trials, base_seed=args.seed)
    print(format_summary(summary, scenario))
    if args.csv:
        summary.write_csv(args.csv)
    return 0


def cmd_online(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    cfg = SimConfig(
        scheduler=_scheduler(args),
        mode=Mode(args.mode),
        release=ReleaseMode(args.release),
        seed=args.seed,
    )
    trace = simulate(scenario, cfg)
    out = Path(args.out)
    write_trace_csvs(trace, out)
    if args.plot:
        plot_utilization(trace, out,
                         title=f"{args.scheduler}/{args.policy} {args.mode}")
    flag = " (truncated)" if trace.truncated else ""
    print(f"makespan: {trace.makespan:.2f}{flag}")
    print(f"jobs completed: {len(trace.job_completions)}")
    print(f"outputs written to {out}/")
    return 0


def cmd_presets(args) -> int:
    for name, sc in sorted(builtin_scenarios().items()):
        servers = len(sc.servers)
        online = ""
        if sc.online:
            jobs = sum(r.queues * r.jobs_per_queue for r in sc.online.roles)
            online = f", online: {len(sc.online.roles)} roles, {jobs} jobs"
        print(f"{name}: {servers} servers, {len(sc.frameworks)} frameworks{online}")
    return 0


def _add_scheduler_flags(p, default_tie):
    p.add_argument("--scheduler", choices=[c.value for c in CriterionKind],
                   default="drf")
    p.add_argument("--policy", choices=[s.value for s in ServerPolicy],
                   default="rrr")
    p.add_argument("--tie-break", choices=["lowest", "random"],
                   default=default_tie)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fairsched",
        description="Multi-resource fair scheduling: progressive filling and "
                    "an online offer-cycle simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("static", help="one deterministic progressive fill")
    p.add_argument("scenario", help="scenario file or preset name")
    _add_scheduler_flags(p, "lowest")
    p.add_argument("--csv", help="write allocation/unused CSV here")
    p.set_defaults(fn=cmd_static)

    p = sub.add_parser("trials", help="repeated randomized fills with statistics")
    p.add_argument("scenario", help="scenario file or preset name")
    _add_scheduler_flags(p, "random")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--csv", help="write summary CSV here")
    p.set_defaults(fn=cmd_trials)

    p = sub.add_parser("online", help="online offer-cycle simulation")
    p.add_argument("scenario", help="scenario file or preset name")
    _add_scheduler_flags(p, "random")
    p.add_argument("--mode", choices=[m.value for m in Mode],
                   default="characterized")
    p.add_argument("--release", choices=[m.value for m in ReleaseMode],
                   default="pool")
    p.add_argument("--out", default="online-out", help="output directory")
    p.add_argument("--plot", action="store_true",
                   help="also render a utilization figure")
    p.set_defaults(fn=cmd_online)

    p = sub.add_parser("presets", help="list built-in scenarios")
    p.set_defaults(fn=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
