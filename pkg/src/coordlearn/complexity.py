"""Graph-based coordination complexity for multi-agent trajectories.

The dependency graph connects agents whose paths pass within a proximity
threshold; edge weights count how many control steps each pair spent that
close.  Entropy of the edge-weight distribution, an interference index from
nearest-neighbor distances, and a goal-overlap term combine into a single
score used to order tasks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ComplexityScore, TaskSpec, Trajectory

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class MetricConfig:
    """Tunable constants of the complexity metric."""

    proximity_threshold: float = 0.5
    interference_scale: float = 2.0
    weights: tuple[float, float, float] = (0.4, 0.3, 0.3)

    def __post_init__(self) -> None:
        if self.proximity_threshold <= 0.0:
            raise ValueError(f"proximity_threshold must be positive, got {self.proximity_threshold}")
        if self.interference_scale <= 0.0:
            raise ValueError(f"interference_scale must be positive, got {self.interference_scale}")
        if len(self.weights) != 3:
            raise ValueError(f"weights must hold three entries, got {self.weights}")
        if any(w < 0.0 for w in self.weights):
            raise ValueError(f"weights must be non-negative, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {self.weights}")


@dataclass(frozen=True)
class DependencyGraph:
    """Pairwise proximity counts for one trajectory."""

    num_agents: int
    edge_weights: np.ndarray  # (N, N) int, symmetric, zero diagonal

    def positive_edges(self) -> np.ndarray:
        """Upper-triangle weights that are strictly positive."""
        iu = np.triu_indices(self.num_agents, k=1)
        w = self.edge_weights[iu]
        return w[w > 0]


def _pairwise_distances(positions: np.ndarray) -> np.ndarray:
    """Euclidean distances between all agent pairs at every step, (T, N, N)."""
    diffs = positions[:, :, None, :] - positions[:, None, :, :]
    return np.sqrt((diffs**2).sum(axis=-1))


def build_dependency_graph(trajectory: Trajectory, theta: float = 0.5) -> DependencyGraph:
    """Count, per agent pair, the steps with separation strictly below theta."""
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    dists = _pairwise_distances(trajectory.positions)
    close = dists < theta
    weights = close.sum(axis=0).astype(np.int64)
    np.fill_diagonal(weights, 0)
    return DependencyGraph(num_agents=trajectory.num_agents, edge_weights=weights)


def graph_entropy(graph: DependencyGraph) -> float:
    """Shannon entropy (bits) of the normalized edge-weight distribution.

    Zero or a single positive edge carries no distributional information,
    so both cases return 0.
    """
    w = graph.positive_edges().astype(float)
    if w.size <= 1:
        return 0.0
    p = w / w.sum()
    return float(-(p * np.log2(p)).sum())


def normalized_entropy(graph: DependencyGraph) -> float:
    """Graph entropy divided by its maximum log2(N(N-1)/2) for N >= 3.

    With N = 2 there is a single possible edge and the raw entropy (always
    zero) is returned unchanged.
    """
    n = graph.num_agents
    if n < 2:
        raise ValueError(f"normalized entropy needs at least two agents, got {n}")
    h = graph_entropy(graph)
    if n == 2:
        return h
    return h / float(np.log2(n * (n - 1) / 2))


def mean_min_distance(trajectory: Trajectory) -> float:
    """Nearest-neighbor distance averaged over every agent and step."""
    if trajectory.num_agents < 2:
        raise ValueError(
            f"mean_min_distance needs at least two agents, got {trajectory.num_agents}"
        )
    dists = _pairwise_distances(trajectory.positions)
    t, n = dists.shape[0], dists.shape[1]
    dists[:, np.arange(n), np.arange(n)] = np.inf
    return float(dists.min(axis=2).mean())


def interference_index(mean_min_dist: float, scale: float = 2.0) -> float:
    """Map average crowding to (0, 1]: closer agents mean more interference."""
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    if mean_min_dist < 0.0:
        raise ValueError(f"mean_min_dist must be non-negative, got {mean_min_dist}")
    return 1.0 / (1.0 + scale * mean_min_dist)


def goal_overlap(num_agents: int, num_goals: int, lambda_local: float) -> float:
    """Competitive pressure when agents outnumber goals, discounted by locality."""
    if num_goals < 1:
        raise ValueError(f"num_goals must be >= 1, got {num_goals}")
    if not 0.0 <= lambda_local <= 1.0:
        raise ValueError(f"lambda_local must be in [0, 1], got {lambda_local}")
    surplus = max(0.0, (num_agents - num_goals) / num_goals)
    return min(1.0, surplus * (1.0 - lambda_local))


def combined_complexity(
    trajectory: Trajectory, spec: TaskSpec, config: MetricConfig | None = None
) -> ComplexityScore:
    """Weighted sum of normalized entropy, interference, and goal overlap."""
    cfg = config if config is not None else MetricConfig()
    if trajectory.num_agents != spec.num_agents:
        raise ValueError(
            f"trajectory has {trajectory.num_agents} agents but spec declares {spec.num_agents}"
        )
    graph = build_dependency_graph(trajectory, cfg.proximity_threshold)
    raw_h = graph_entropy(graph)
    h = normalized_entropy(graph)
    dbar = mean_min_distance(trajectory)
    interf = interference_index(dbar, cfg.interference_scale)
    overlap = goal_overlap(spec.num_agents, spec.num_goals, spec.lambda_local)
    a, b, c = cfg.weights
    combined = a * h + b * interf + c * overlap
    return ComplexityScore(
        entropy=h,
        interference=interf,
        goal_overlap=overlap,
        combined=combined,
        raw_entropy=raw_h,
        mean_min_distance=dbar,
        weights=tuple(cfg.weights),
    )
