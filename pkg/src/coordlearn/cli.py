"""Command-line pipeline: score trajectories, validate the metric, train, compare.

All runs are explicitly seeded and write plain CSV artifacts plus a small
manifest recording the resolved configuration hash, so identical invocations
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from .complexity import MetricConfig, combined_complexity
from .core import EnvFamily, TaskSpec, load_trajectory
from .curriculum import SchedulerKind, run_curriculum, write_run_log_csv
from .envs import generate_task_suite, transport_suite, validation_suite
from .learner import MaddpgConfig, MaddpgLearner, save_checkpoint
from .oracle import mean_complexity, validate_metric, write_validation_csvs

DEFAULT_BUDGET = 3000


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ValueError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_suite(config: dict, seed: int) -> list[TaskSpec]:
    suite_cfg = config.get("suite", {"preset": "validation"})
    if "preset" in suite_cfg:
        preset = suite_cfg["preset"]
        if preset == "validation":
            return validation_suite(seed)
        if preset == "transport":
            return transport_suite(seed)
        raise ValueError(f"unknown suite preset {preset!r} (expected validation or transport)")
    if "base" in suite_cfg and "sweep" in suite_cfg:
        base_fields = dict(suite_cfg["base"])
        base_fields["family"] = EnvFamily.parse(base_fields.get("family", "navigation"))
        base_fields.setdefault("seed", seed)
        base = TaskSpec(**base_fields)
        return generate_task_suite(base, suite_cfg["sweep"])
    raise ValueError("suite config must give a preset or a base plus sweep")


def _write_manifest(out_dir: str, command: str, resolved: dict, outputs: list[str]) -> None:
    canonical = json.dumps(resolved, sort_keys=True)
    manifest = {
        "command": command,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "resolved_config": resolved,
        "outputs": sorted(outputs),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _score_suite(suite: list[TaskSpec], rollouts_per_task: int):
    cfg = MetricConfig()
    return [(spec, mean_complexity(spec, cfg, rollouts_per_task)) for spec in suite]


def cmd_complexity(args: argparse.Namespace) -> int:
    trajectory = load_trajectory(args.trajectory)
    weights = tuple(float(w) for w in args.weights.split(","))
    cfg = MetricConfig(
        proximity_threshold=args.theta,
        interference_scale=args.interference_scale,
        weights=weights,
    )
    spec = TaskSpec(
        family=EnvFamily.parse(args.family),
        num_agents=trajectory.num_agents,
        num_goals=args.goals,
        lambda_local=args.lambda_local,
        episode_length=max(10, trajectory.horizon),
        seed=args.seed,
    )
    score = combined_complexity(trajectory, spec, cfg)
    print(f"raw_entropy_bits {score.raw_entropy!r}")
    print(f"entropy {score.entropy!r}")
    print(f"interference {score.interference!r}")
    print(f"goal_overlap {score.goal_overlap!r}")
    print(f"combined {score.combined!r}")
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "complexity.csv")
    with open(out_path, "w", newline="", encoding="ascii") as fh:
        fh.write("num_agents,horizon,raw_entropy,entropy,interference,goal_overlap,combined\n")
        fh.write(
            f"{trajectory.num_agents},{trajectory.horizon},{score.raw_entropy!r},"
            f"{score.entropy!r},{score.interference!r},{score.goal_overlap!r},{score.combined!r}\n"
        )
    resolved = {
        "trajectory": os.path.abspath(args.trajectory),
        "family": args.family,
        "goals": args.goals,
        "lambda_local": args.lambda_local,
        "theta": args.theta,
        "interference_scale": args.interference_scale,
        "weights": list(weights),
        "seed": args.seed,
    }
    _write_manifest(args.out, "complexity", resolved, ["complexity.csv"])
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    suite = _resolve_suite(config, args.seed)
    if len(suite) < 3:
        raise ValueError(f"need >= 3 tasks to validate, got {len(suite)}")
    episodes = args.episodes if args.episodes is not None else config.get("episodes", 100)
    rollouts = config.get("rollouts_per_task", 10)
    report = validate_metric(suite, MetricConfig(), episodes, rollouts)
    os.makedirs(args.out, exist_ok=True)
    per_task, summary = write_validation_csvs(report, args.out)
    print(f"rho_combined {report.rho_combined!r} (p={report.p_value_combined!r})")
    print(f"rho_entropy_only {report.rho_entropy_only!r}")
    print(f"rho_interference_only {report.rho_interference_only!r}")
    print(f"rho_parameter_based {report.rho_parameter_based!r}")
    resolved = {
        "suite": [s.seed for s in suite],
        "episodes": episodes,
        "rollouts_per_task": rollouts,
        "seed": args.seed,
    }
    _write_manifest(
        args.out, "validate", resolved, [os.path.basename(per_task), os.path.basename(summary)]
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    if "suite" not in config:
        config["suite"] = {"preset": "transport"}
    suite = _resolve_suite(config, args.seed)
    budget = args.episodes if args.episodes is not None else config.get("budget_episodes", DEFAULT_BUDGET)
    rollouts = config.get("rollouts_per_task", 10)
    kind = SchedulerKind.parse(args.scheduler)
    scored = _score_suite(suite, rollouts)
    learner = MaddpgLearner([spec for spec, _ in scored], MaddpgConfig(), seed=args.seed)
    run_log = run_curriculum(scored, kind, learner, budget, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    log_path = os.path.join(args.out, "run_log.csv")
    write_run_log_csv(run_log, log_path)
    ckpt_path = os.path.join(args.out, "checkpoint.npz")
    save_checkpoint(learner.agents, ckpt_path)
    print(f"episodes_run {len(run_log.episodes)}")
    print(f"completion_fraction {run_log.completion_fraction!r}")
    print(f"success_completion_fraction {run_log.success_completion_fraction!r}")
    print(f"final_mean_return {run_log.final_mean_return()!r}")
    resolved = {
        "suite": [s.seed for s in suite],
        "scheduler": kind.value,
        "budget_episodes": budget,
        "rollouts_per_task": rollouts,
        "seed": args.seed,
    }
    _write_manifest(args.out, "train", resolved, ["run_log.csv", "checkpoint.npz"])
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    if "suite" not in config:
        config["suite"] = {"preset": "transport"}
    suite = _resolve_suite(config, args.seed)
    budget = args.episodes if args.episodes is not None else config.get("budget_episodes", DEFAULT_BUDGET)
    rollouts = config.get("rollouts_per_task", 10)
    scheduler_names = config.get("schedulers", ["complexity", "random"])
    if len(scheduler_names) < 2:
        raise ValueError(f"need >= 2 schedulers to compare, got {scheduler_names}")
    seeds = config.get("seeds", [args.seed, args.seed + 1, args.seed + 2])
    if not seeds:
        raise ValueError("need >= 1 seed to compare")
    kinds = [SchedulerKind.parse(name) for name in scheduler_names]
    scored = _score_suite(suite, rollouts)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    outputs = ["comparison.csv"]
    for kind in kinds:
        for seed in seeds:
            learner = MaddpgLearner([spec for spec, _ in scored], MaddpgConfig(), seed=seed)
            run_log = run_curriculum(scored, kind, learner, budget, seed=seed)
            log_name = f"run_log_{kind.value}_seed{seed}.csv"
            write_run_log_csv(run_log, os.path.join(args.out, log_name))
            outputs.append(log_name)
            rows.append(
                [
                    kind.value, seed, budget,
                    repr(run_log.completion_fraction),
                    repr(run_log.success_completion_fraction),
                    repr(run_log.final_task_mean_return()),
                    run_log.episodes_to_first_advance,
                ]
            )
            print(
                f"{kind.value} seed={seed} completion={rows[-1][3]} "
                f"mastered={rows[-1][4]} final_return={rows[-1][5]}"
            )
    comparison_path = os.path.join(args.out, "comparison.csv")
    with open(comparison_path, "w", newline="", encoding="ascii") as fh:
        fh.write(
            "scheduler,seed,budget,completion_fraction,success_completion_fraction,"
            "final_task_mean_return,episodes_to_first_advance\n"
        )
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    resolved = {
        "suite": [s.seed for s in suite],
        "schedulers": [k.value for k in kinds],
        "seeds": list(seeds),
        "budget_episodes": budget,
        "rollouts_per_task": rollouts,
    }
    _write_manifest(args.out, "compare", resolved, outputs)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coordlearn",
        description="Coordination-complexity scoring and curriculum training for multi-agent tasks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cx = sub.add_parser("complexity", help="score one trajectory file")
    p_cx.add_argument("trajectory", help="trajectory file (header 'N T', one step per line)")
    p_cx.add_argument("--family", default="navigation")
    p_cx.add_argument("--goals", type=int, default=1)
    p_cx.add_argument("--lambda-local", dest="lambda_local", type=float, default=0.0)
    p_cx.add_argument("--theta", type=float, default=0.5)
    p_cx.add_argument("--interference-scale", type=float, default=2.0)
    p_cx.add_argument("--weights", default="0.4,0.3,0.3")
    p_cx.set_defaults(func=cmd_complexity)

    p_val = sub.add_parser("validate", help="rank-correlate the metric against random-policy difficulty")
    p_val.set_defaults(func=cmd_validate)

    p_train = sub.add_parser("train", help="run one curriculum training run")
    p_train.set_defaults(func=cmd_train)

    p_cmp = sub.add_parser("compare", help="run schedulers side by side on paired seeds")
    p_cmp.set_defaults(func=cmd_compare)

    for p in (p_cx, p_val, p_train, p_cmp):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--episodes", type=int, default=None, help="episode count / budget override")
        p.add_argument("--scheduler", default="complexity", help="complexity|parameter|reverse|random")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
