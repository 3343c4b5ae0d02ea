"""Coordination-complexity scoring, analog environments, and curriculum training.

The package measures how much coordination a multi-agent task demands by
scoring agent trajectories (proximity-graph entropy, interference, goal
contention), validates that score against random-policy difficulty, and uses
it to order tasks for a small deterministic MADDPG learner.
"""

from .complexity import (
    DependencyGraph,
    MetricConfig,
    build_dependency_graph,
    combined_complexity,
    goal_overlap,
    graph_entropy,
    interference_index,
    mean_min_distance,
    normalized_entropy,
)
from .core import (
    ComplexityScore,
    EnvFamily,
    TaskSpec,
    Trajectory,
    load_trajectory,
    save_trajectory,
)
from .curriculum import (
    CurriculumState,
    Decision,
    EpisodeLog,
    OrderedTask,
    RunLog,
    SchedulerKind,
    ScriptedLearner,
    order_tasks,
    report_episode,
    run_curriculum,
    write_run_log_csv,
)
from .envs import (
    JointTransportEnv,
    MultiAgentEnv,
    NavigationEnv,
    derive_seed,
    generate_task_suite,
    make_env,
    random_policy,
    record_rollout,
    transport_suite,
    validation_suite,
)
from .learner import (
    MaddpgAgentSet,
    MaddpgConfig,
    MaddpgLearner,
    Mlp,
    ReplayBuffer,
    load_checkpoint,
    save_checkpoint,
    soft_update,
)
from .oracle import (
    DifficultyRecord,
    ValidationReport,
    calibrate_weights,
    evaluate_difficulty,
    mean_complexity,
    rank_difficulty,
    spearman_exact_pvalue,
    spearman_rho,
    validate_metric,
    weight_grid,
    write_validation_csvs,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexityScore",
    "CurriculumState",
    "Decision",
    "DependencyGraph",
    "DifficultyRecord",
    "EnvFamily",
    "EpisodeLog",
    "JointTransportEnv",
    "MaddpgAgentSet",
    "MaddpgConfig",
    "MaddpgLearner",
    "MetricConfig",
    "Mlp",
    "MultiAgentEnv",
    "NavigationEnv",
    "OrderedTask",
    "ReplayBuffer",
    "RunLog",
    "SchedulerKind",
    "ScriptedLearner",
    "TaskSpec",
    "Trajectory",
    "ValidationReport",
    "build_dependency_graph",
    "calibrate_weights",
    "combined_complexity",
    "derive_seed",
    "evaluate_difficulty",
    "generate_task_suite",
    "goal_overlap",
    "graph_entropy",
    "interference_index",
    "load_checkpoint",
    "load_trajectory",
    "make_env",
    "mean_complexity",
    "mean_min_distance",
    "normalized_entropy",
    "order_tasks",
    "random_policy",
    "rank_difficulty",
    "record_rollout",
    "report_episode",
    "run_curriculum",
    "save_checkpoint",
    "save_trajectory",
    "soft_update",
    "spearman_exact_pvalue",
    "spearman_rho",
    "transport_suite",
    "validate_metric",
    "validation_suite",
    "weight_grid",
    "write_run_log_csv",
    "write_validation_csvs",
]
