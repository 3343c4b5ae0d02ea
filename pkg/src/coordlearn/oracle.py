"""Ground-truth difficulty and rank-correlation validation of the metric.

Difficulty is what a uniform-random policy experiences: tasks are ranked by
mean episode return (summed over agents), lower return meaning harder.  The
complexity metric is validated by Spearman correlation of its scores, and of
three ablated predictors, against that ranking.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .complexity import MetricConfig, combined_complexity
from .core import ComplexityScore, TaskSpec
from .envs import derive_seed, make_env, random_policy, record_rollout

DEFAULT_EPISODES = 100
DEFAULT_ROLLOUTS_PER_TASK = 10


@dataclass(frozen=True)
class DifficultyRecord:
    """Random-policy performance on one task."""

    task: TaskSpec
    mean_return: float
    success_rate: float
    episodes: int
    difficulty_rank: int = 0  # 1 = hardest, assigned by rank_difficulty


@dataclass(frozen=True)
class ValidationReport:
    """Per-task scores paired with difficulty, plus rank correlations."""

    pairs: list[tuple[ComplexityScore, DifficultyRecord]]
    rho_combined: float
    rho_entropy_only: float
    rho_interference_only: float
    rho_parameter_based: float
    p_value_combined: float


def evaluate_difficulty(spec: TaskSpec, episodes: int = DEFAULT_EPISODES, seed: int = 0) -> DifficultyRecord:
    """Run uniform-random episodes; report mean summed return and success rate."""
    if episodes < 1:
        raise ValueError(f"episodes must be >= 1, got {episodes}")
    env = make_env(spec)
    action_rng = np.random.default_rng(seed)
    returns = np.zeros(episodes)
    successes = 0
    for ep in range(episodes):
        observations = env.reset()
        total = 0.0
        done = False
        success = False
        while not done:
            actions = action_rng.uniform(-1.0, 1.0, (spec.num_agents, 2))
            result = env.step(actions)
            total += float(result.rewards.sum())
            done, success = result.done, result.success
        returns[ep] = total
        successes += int(success)
    return DifficultyRecord(
        task=spec,
        mean_return=float(returns.mean()),
        success_rate=successes / episodes,
        episodes=episodes,
    )


def rank_difficulty(records: list[DifficultyRecord]) -> list[DifficultyRecord]:
    """Assign ranks 1..n, 1 = hardest (lowest mean return).

    Ties on mean return break by descending success rate, then by the
    records' generation order.
    """
    order = sorted(
        range(len(records)),
        key=lambda i: (records[i].mean_return, -records[i].success_rate, i),
    )
    ranked = list(records)
    for rank_minus_1, idx in enumerate(order):
        ranked[idx] = replace(records[idx], difficulty_rank=rank_minus_1 + 1)
    return ranked


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(a, b) -> tuple[float, float]:
    """Spearman rank correlation with average-rank ties and a t-based p-value.

    Tie-free inputs use the exact formula 1 - 6*sum(d^2)/(n*(n^2-1)); with
    ties, rho is the Pearson correlation of the average ranks.  The two-sided
    p-value uses t = rho*sqrt((n-2)/(1-rho^2)) against Student's t with n-2
    degrees of freedom.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"inputs must be equal-length 1-D lists, got {x.shape} and {y.shape}")
    n = len(x)
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    if (x == x[0]).all() or (y == y[0]).all():
        raise ValueError("constant input: rank correlation is undefined")
    rx, ry = _average_ranks(x), _average_ranks(y)
    if len(np.unique(x)) == n and len(np.unique(y)) == n:
        d = rx - ry
        rho = 1.0 - 6.0 * float((d * d).sum()) / (n * (n * n - 1))
    else:
        cx, cy = rx - rx.mean(), ry - ry.mean()
        rho = float((cx * cy).sum() / math.sqrt((cx * cx).sum() * (cy * cy).sum()))
    rho = min(1.0, max(-1.0, rho))
    if abs(rho) == 1.0:
        p_value = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p_value = 2.0 * float(stats.t.sf(abs(t), df=n - 2))
    return rho, p_value


def spearman_exact_pvalue(a, b) -> float:
    """Two-sided exact permutation p-value for small samples (n <= 8)."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    n = len(x)
    if n > 8:
        raise ValueError(f"exact permutation test limited to n <= 8, got {n}")
    rho_obs, _ = spearman_rho(x, y)
    rx, ry = _average_ranks(x), _average_ranks(y)
    cx = rx - rx.mean()
    hits = 0
    total = 0
    for perm in itertools.permutations(range(n)):
        cy = ry[list(perm)]
        cy = cy - cy.mean()
        rho = float((cx * cy).sum() / math.sqrt((cx * cx).sum() * (cy * cy).sum()))
        hits += int(abs(rho) >= abs(rho_obs) - 1e-12)
        total += 1
    return hits / total


def _parameter_predictor(spec: TaskSpec) -> float:
    # agent count is primary; more goals rank the task slightly easier
    return spec.num_agents * 1e6 - spec.num_goals


def mean_complexity(
    spec: TaskSpec, cfg: MetricConfig, rollouts_per_task: int = DEFAULT_ROLLOUTS_PER_TASK
) -> ComplexityScore:
    """Average component scores over seeded random-policy rollouts of one task."""
    env = make_env(spec)
    policy = random_policy(spec.num_agents, np.random.default_rng(derive_seed(spec.seed, 1)))
    rollouts = record_rollout(env, policy, rollouts_per_task)
    scores = [combined_complexity(t, spec, cfg) for t in rollouts]
    h = float(np.mean([s.entropy for s in scores]))
    raw_h = float(np.mean([s.raw_entropy for s in scores]))
    interf = float(np.mean([s.interference for s in scores]))
    overlap = float(np.mean([s.goal_overlap for s in scores]))
    dbar = float(np.mean([s.mean_min_distance for s in scores]))
    a, b, c = cfg.weights
    return ComplexityScore(
        entropy=h,
        interference=interf,
        goal_overlap=overlap,
        combined=a * h + b * interf + c * overlap,
        raw_entropy=raw_h,
        mean_min_distance=dbar,
        weights=tuple(cfg.weights),
    )


def _suite_measurements(
    suite: list[TaskSpec], cfg: MetricConfig, episodes: int, rollouts_per_task: int
) -> tuple[list[ComplexityScore], list[DifficultyRecord], np.ndarray]:
    scores = [mean_complexity(spec, cfg, rollouts_per_task) for spec in suite]
    records = [
        evaluate_difficulty(spec, episodes, seed=derive_seed(spec.seed, 2)) for spec in suite
    ]
    records = rank_difficulty(records)
    n = len(suite)
    # hardness grows with difficulty: the rank-1 (hardest) task scores n
    hardness = np.array([n + 1 - r.difficulty_rank for r in records], dtype=float)
    return scores, records, hardness


def validate_metric(
    suite: list[TaskSpec],
    cfg: MetricConfig | None = None,
    episodes: int = DEFAULT_EPISODES,
    rollouts_per_task: int = DEFAULT_ROLLOUTS_PER_TASK,
) -> ValidationReport:
    """Correlate the combined metric and three ablations with random-policy difficulty."""
    if len(suite) < 3:
        raise ValueError(f"need >= 3 tasks to validate, got {len(suite)}")
    cfg = cfg if cfg is not None else MetricConfig()
    scores, records, hardness = _suite_measurements(suite, cfg, episodes, rollouts_per_task)
    combined = [s.combined for s in scores]
    entropy_only = [s.raw_entropy for s in scores]
    interference_only = [s.interference for s in scores]
    parameter_based = [_parameter_predictor(spec) for spec in suite]
    rho_c, p_c = spearman_rho(combined, hardness)
    rho_h, _ = spearman_rho(entropy_only, hardness)
    rho_i, _ = spearman_rho(interference_only, hardness)
    rho_p, _ = spearman_rho(parameter_based, hardness)
    return ValidationReport(
        pairs=list(zip(scores, records)),
        rho_combined=rho_c,
        rho_entropy_only=rho_h,
        rho_interference_only=rho_i,
        rho_parameter_based=rho_p,
        p_value_combined=p_c,
    )


def weight_grid(grid_step: float) -> list[tuple[float, float, float]]:
    """All non-negative weight triples summing to 1 at the given resolution."""
    if grid_step not in (0.05, 0.1):
        raise ValueError(f"grid_step must be 0.05 or 0.1, got {grid_step}")
    steps = round(1.0 / grid_step)
    grid = []
    for i in range(steps + 1):
        for j in range(steps + 1 - i):
            k = steps - i - j
            grid.append((i / steps, j / steps, k / steps))
    return grid


def calibrate_weights(
    suite: list[TaskSpec],
    episodes: int = DEFAULT_EPISODES,
    grid_step: float = 0.1,
    rollouts_per_task: int = DEFAULT_ROLLOUTS_PER_TASK,
) -> tuple[tuple[float, float, float], float]:
    """Grid-search metric weights for maximum rank correlation with difficulty.

    Ties prefer a larger entropy weight, then larger interference weight.
    Candidate triples whose predictor is constant across the suite are skipped.
    """
    if len(suite) < 5:
        raise ValueError(f"need >= 5 tasks to calibrate, got {len(suite)}")
    cfg = MetricConfig()
    scores, _, hardness = _suite_measurements(suite, cfg, episodes, rollouts_per_task)
    components = np.array([[s.entropy, s.interference, s.goal_overlap] for s in scores])
    best: tuple[float, float, float] | None = None
    best_key: tuple[float, float, float] | None = None
    best_rho = 0.0
    for triple in weight_grid(grid_step):
        predictor = components @ np.asarray(triple)
        if (predictor == predictor[0]).all():
            continue
        rho, _ = spearman_rho(predictor, hardness)
        key = (rho, triple[0], triple[1])
        if best_key is None or key > best_key:
            best, best_key, best_rho = triple, key, rho
    if best is None:
        raise ValueError("every candidate weighting is constant on this suite")
    return best, best_rho


def write_validation_csvs(report: ValidationReport, out_dir: str) -> tuple[str, str]:
    """Write per-task and summary CSVs; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    per_task_path = os.path.join(out_dir, "validation_per_task.csv")
    n = len(report.pairs)
    combined = [s.combined for s, _ in report.pairs]
    complexity_order = sorted(range(n), key=lambda i: (-combined[i], i))
    complexity_rank = [0] * n
    for pos, idx in enumerate(complexity_order):
        complexity_rank[idx] = pos + 1
    with open(per_task_path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "family", "num_agents", "num_goals", "lambda_local", "episode_length",
                "seed", "raw_entropy", "entropy", "interference", "goal_overlap",
                "raw_goal_overlap", "combined", "mean_return", "success_rate",
                "complexity_rank", "difficulty_rank",
            ]
        )
        for i, (score, record) in enumerate(report.pairs):
            spec = record.task
            # unclamped overlap, logged so the [0,1] clamp loses no information
            raw_overlap = max(0.0, (spec.num_agents - spec.num_goals) / spec.num_goals) * (
                1.0 - spec.lambda_local
            )
            writer.writerow(
                [
                    spec.family.value, spec.num_agents, spec.num_goals,
                    repr(spec.lambda_local), spec.episode_length, spec.seed,
                    repr(score.raw_entropy), repr(score.entropy),
                    repr(score.interference), repr(score.goal_overlap),
                    repr(raw_overlap), repr(score.combined), repr(record.mean_return),
                    repr(record.success_rate), complexity_rank[i],
                    record.difficulty_rank,
                ]
            )
    summary_path = os.path.join(out_dir, "validation_summary.csv")
    with open(summary_path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statistic", "value"])
        writer.writerow(["rho_combined", repr(report.rho_combined)])
        writer.writerow(["rho_entropy_only", repr(report.rho_entropy_only)])
        writer.writerow(["rho_interference_only", repr(report.rho_interference_only)])
        writer.writerow(["rho_parameter_based", repr(report.rho_parameter_based)])
        writer.writerow(["p_value_combined", repr(report.p_value_combined)])
    return per_task_path, summary_path
