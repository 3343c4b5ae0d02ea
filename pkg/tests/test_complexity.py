"""Complexity metric: frozen example values, brute-force oracles, invariants."""

import math

import numpy as np
import pytest

from coordlearn import (
    DependencyGraph,
    EnvFamily,
    MetricConfig,
    TaskSpec,
    Trajectory,
    build_dependency_graph,
    combined_complexity,
    goal_overlap,
    graph_entropy,
    interference_index,
    mean_min_distance,
    normalized_entropy,
)


def stationary_pair(distance, steps=10):
    pos = np.zeros((steps, 2, 2))
    pos[:, 1, 0] = distance
    return Trajectory(pos)


def random_trajectory(t, n, seed):
    rng = np.random.default_rng(seed)
    return Trajectory(rng.uniform(-1.0, 1.0, (t, n, 2)))


def graph_of(weights_by_pair, n):
    w = np.zeros((n, n), dtype=np.int64)
    for (i, j), v in weights_by_pair.items():
        w[i, j] = w[j, i] = v
    return DependencyGraph(num_agents=n, edge_weights=w)


def brute_force_weights(traj, theta):
    t, n = traj.horizon, traj.num_agents
    w = np.zeros((n, n), dtype=np.int64)
    for step in range(t):
        for i in range(n):
            for j in range(i + 1, n):
                if math.dist(traj.positions[step, i], traj.positions[step, j]) < theta:
                    w[i, j] += 1
                    w[j, i] += 1
    return w


class TestDependencyGraph:
    def test_pair_always_within_threshold(self):
        graph = build_dependency_graph(stationary_pair(0.3), theta=0.5)
        assert graph.edge_weights[0, 1] == 10

    def test_pair_always_outside_threshold(self):
        graph = build_dependency_graph(stationary_pair(0.7), theta=0.5)
        assert graph.edge_weights[0, 1] == 0

    def test_distance_equal_to_threshold_does_not_count(self):
        graph = build_dependency_graph(stationary_pair(0.5), theta=0.5)
        assert graph.edge_weights[0, 1] == 0

    def test_matches_brute_force_count(self):
        for seed in range(5):
            traj = random_trajectory(40, 3, seed)
            graph = build_dependency_graph(traj, theta=0.5)
            assert np.array_equal(graph.edge_weights, brute_force_weights(traj, 0.5))

    def test_symmetric_zero_diagonal_bounded(self):
        traj = random_trajectory(25, 5, seed=9)
        graph = build_dependency_graph(traj, theta=0.6)
        w = graph.edge_weights
        assert np.array_equal(w, w.T)
        assert (np.diag(w) == 0).all()
        assert w.min() >= 0 and w.max() <= 25

    def test_rejects_non_positive_theta(self):
        with pytest.raises(ValueError, match="theta"):
            build_dependency_graph(stationary_pair(0.3), theta=0.0)


class TestGraphEntropy:
    def test_single_edge_zero(self):
        assert graph_entropy(graph_of({(0, 1): 7}, 3)) == 0.0

    def test_no_edges_zero(self):
        assert graph_entropy(graph_of({}, 4)) == 0.0

    def test_two_equal_edges_one_bit(self):
        h = graph_entropy(graph_of({(0, 1): 5, (1, 2): 5}, 3))
        assert h == pytest.approx(1.0, abs=1e-12)

    def test_weights_1_1_2_give_1p5_bits(self):
        h = graph_entropy(graph_of({(0, 1): 1, (0, 2): 1, (1, 2): 2}, 3))
        assert h == pytest.approx(1.5, abs=1e-12)

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            w = {}
            for i in range(n):
                for j in range(i + 1, n):
                    w[(i, j)] = int(rng.integers(0, 9))
            graph = graph_of(w, n)
            positive = [v for v in w.values() if v > 0]
            if len(positive) <= 1:
                expected = 0.0
            else:
                total = sum(positive)
                expected = -sum((v / total) * math.log2(v / total) for v in positive)
            assert graph_entropy(graph) == pytest.approx(expected, abs=1e-12)


class TestNormalizedEntropy:
    def test_three_agents_two_equal_edges(self):
        hn = normalized_entropy(graph_of({(0, 1): 4, (1, 2): 4}, 3))
        assert hn == pytest.approx(1.0 / math.log2(3), abs=1e-12)
        assert hn == pytest.approx(0.631, abs=5e-4)

    def test_two_agents_single_edge_zero(self):
        assert normalized_entropy(graph_of({(0, 1): 6}, 2)) == 0.0

    def test_four_agents_uniform_six_edges_is_one(self):
        w = {(i, j): 3 for i in range(4) for j in range(i + 1, 4)}
        assert normalized_entropy(graph_of(w, 4)) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_single_agent(self):
        with pytest.raises(ValueError, match="two agents"):
            normalized_entropy(DependencyGraph(num_agents=1, edge_weights=np.zeros((1, 1))))


class TestMeanMinDistance:
    def test_constant_pair_distance(self):
        assert mean_min_distance(stationary_pair(0.42)) == pytest.approx(0.42, abs=1e-12)

    def test_equilateral_triangle_side(self):
        s = 0.6
        corners = np.array([[0.0, 0.0], [s, 0.0], [s / 2, s * math.sqrt(3) / 2]])
        pos = np.tile(corners - 0.3, (8, 1, 1))
        assert mean_min_distance(Trajectory(pos)) == pytest.approx(s, abs=1e-12)

    def test_matches_brute_force(self):
        traj = random_trajectory(30, 4, seed=11)
        total = 0.0
        for t in range(30):
            for i in range(4):
                total += min(
                    math.dist(traj.positions[t, i], traj.positions[t, j])
                    for j in range(4)
                    if j != i
                )
        assert mean_min_distance(traj) == pytest.approx(total / (30 * 4), abs=1e-12)

    def test_rejects_single_agent(self):
        with pytest.raises(ValueError, match="two agents"):
            mean_min_distance(Trajectory(np.zeros((5, 1, 2))))


class TestInterferenceIndex:
    def test_zero_distance(self):
        assert interference_index(0.0, 2.0) == 1.0

    def test_half_distance_default_scale(self):
        assert interference_index(0.5, 2.0) == pytest.approx(0.5, abs=1e-12)

    def test_distance_two(self):
        assert interference_index(2.0, 2.0) == pytest.approx(0.2, abs=1e-12)

    def test_monotone_decreasing(self):
        rng = np.random.default_rng(4)
        draws = np.sort(rng.uniform(0.0, 3.0, 50))
        values = [interference_index(d, 2.0) for d in draws]
        assert all(a > b for a, b in zip(values, values[1:]) if a != b)
        for d1, d2 in zip(draws, draws[1:]):
            if d1 < d2:
                assert interference_index(d1, 2.0) > interference_index(d2, 2.0)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError, match="scale"):
            interference_index(0.5, 0.0)
        with pytest.raises(ValueError, match="mean_min_dist"):
            interference_index(-0.1, 2.0)


class TestGoalOverlap:
    def test_equal_agents_and_goals(self):
        for lam in (0.0, 0.5, 1.0):
            assert goal_overlap(3, 3, lam) == 0.0

    def test_surplus_fully_competitive(self):
        assert goal_overlap(4, 2, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_surplus_fully_local(self):
        assert goal_overlap(4, 2, 1.0) == 0.0

    def test_clamped_to_one(self):
        assert goal_overlap(8, 1, 0.0) == 1.0

    def test_rejects_zero_goals(self):
        with pytest.raises(ValueError, match="num_goals"):
            goal_overlap(3, 0, 0.5)

    def test_rejects_lambda_outside_unit(self):
        with pytest.raises(ValueError, match="lambda_local"):
            goal_overlap(3, 2, 1.5)


class TestMetricConfig:
    def test_defaults(self):
        cfg = MetricConfig()
        assert cfg.proximity_threshold == 0.5
        assert cfg.interference_scale == 2.0
        assert cfg.weights == (0.4, 0.3, 0.3)

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError, match="non-negative"):
            MetricConfig(weights=(0.5, 0.6, -0.1))

    def test_rejects_weights_not_summing_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            MetricConfig(weights=(0.4, 0.3, 0.2))

    def test_tolerates_tiny_sum_error(self):
        MetricConfig(weights=(0.4, 0.3, 0.3 + 5e-10))

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError, match="proximity_threshold"):
            MetricConfig(proximity_threshold=0.0)


class TestCombinedComplexity:
    def test_weighted_sum_example(self):
        # pair at constant distance 0.5: H = 0, I = 1/(1+2*0.5) = 0.5, O = 0
        spec = TaskSpec(EnvFamily.NAVIGATION, num_agents=2, num_goals=2, lambda_local=1.0)
        traj = stationary_pair(0.5)
        score = combined_complexity(traj, spec)
        assert score.entropy == 0.0
        assert score.interference == pytest.approx(0.5, abs=1e-12)
        assert score.goal_overlap == 0.0
        assert score.combined == pytest.approx(0.3 * 0.5, abs=1e-12)

    def test_square_corners_hand_derived(self):
        # 4 agents fixed at square corners, side 0.25: all 6 pairwise
        # distances < 0.5 so edge weights are uniform (H_norm = 1 exactly),
        # nearest neighbor is 0.25 so I = 1/1.5, and G >= N keeps O = 0.
        s = 0.25
        corners = np.array([[0.0, 0.0], [s, 0.0], [0.0, s], [s, s]])
        traj = Trajectory(np.tile(corners, (6, 1, 1)))
        spec = TaskSpec(EnvFamily.NAVIGATION, num_agents=4, num_goals=4, lambda_local=0.0)
        score = combined_complexity(traj, spec)
        assert score.entropy == pytest.approx(1.0, abs=1e-12)
        assert score.raw_entropy == pytest.approx(math.log2(6), abs=1e-12)
        assert score.interference == pytest.approx(1.0 / 1.5, abs=1e-12)
        assert score.goal_overlap == 0.0
        assert score.combined == pytest.approx(0.4 + 0.3 / 1.5, abs=1e-12)

    def test_far_apart_pair_reduces_to_interference_term(self):
        spec = TaskSpec(EnvFamily.NAVIGATION, num_agents=2, num_goals=2, lambda_local=1.0)
        traj = stationary_pair(0.9)
        score = combined_complexity(traj, spec)
        assert score.raw_entropy == 0.0
        assert score.goal_overlap == 0.0
        assert score.combined == pytest.approx(0.3 * score.interference, abs=1e-12)

    def test_agent_count_mismatch(self):
        spec = TaskSpec(EnvFamily.NAVIGATION, num_agents=3, num_goals=2, lambda_local=0.5)
        with pytest.raises(ValueError, match="declares 3"):
            combined_complexity(stationary_pair(0.3), spec)

    def test_matches_straight_line_reimplementation(self):
        cfg = MetricConfig()
        rng = np.random.default_rng(21)
        for seed in range(10):
            n = int(rng.integers(2, 7))
            goals = int(rng.integers(1, 5))
            lam = float(rng.uniform(0.0, 1.0))
            traj = random_trajectory(int(rng.integers(5, 40)), n, seed + 100)
            spec = TaskSpec(EnvFamily.NAVIGATION, n, goals, lam)
            score = combined_complexity(traj, spec, cfg)

            w = brute_force_weights(traj, cfg.proximity_threshold)
            positive = [w[i, j] for i in range(n) for j in range(i + 1, n) if w[i, j] > 0]
            if len(positive) <= 1:
                raw_h = 0.0
            else:
                tot = sum(positive)
                raw_h = -sum((v / tot) * math.log2(v / tot) for v in positive)
            h_norm = raw_h if n == 2 else raw_h / math.log2(n * (n - 1) / 2)
            total = 0.0
            for t in range(traj.horizon):
                for i in range(n):
                    total += min(
                        math.dist(traj.positions[t, i], traj.positions[t, j])
                        for j in range(n)
                        if j != i
                    )
            dbar = total / (traj.horizon * n)
            interf = 1.0 / (1.0 + cfg.interference_scale * dbar)
            over = min(1.0, max(0.0, (n - goals) / goals) * (1.0 - lam))
            expected = 0.4 * h_norm + 0.3 * interf + 0.3 * over

            assert score.raw_entropy == pytest.approx(raw_h, abs=1e-12)
            assert score.entropy == pytest.approx(h_norm, abs=1e-12)
            assert score.interference == pytest.approx(interf, abs=1e-12)
            assert score.goal_overlap == pytest.approx(over, abs=1e-12)
            assert score.combined == pytest.approx(expected, abs=1e-12)

    def test_combined_is_weighted_sum_of_fields(self):
        traj = random_trajectory(20, 4, seed=2)
        spec = TaskSpec(EnvFamily.NAVIGATION, 4, 2, 0.25)
        score = combined_complexity(traj, spec)
        a, b, c = score.weights
        recomputed = a * score.entropy + b * score.interference + c * score.goal_overlap
        assert score.combined == pytest.approx(recomputed, abs=1e-12)


class TestMetricInvariants:
    """Smaller-scale versions of the randomized invariant sweep."""

    def test_entropy_bounds(self):
        for seed in range(30):
            traj = random_trajectory(20, int(np.random.default_rng(seed).integers(2, 7)), seed)
            graph = build_dependency_graph(traj, 0.5)
            h = graph_entropy(graph)
            edges = graph.positive_edges().size
            assert h >= 0.0
            if edges >= 1:
                assert h <= math.log2(edges) + 1e-12

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        for seed in range(20):
            n = int(rng.integers(2, 7))
            traj = random_trajectory(15, n, seed)
            spec = TaskSpec(EnvFamily.NAVIGATION, n, 2, 0.5)
            perm = rng.permutation(n)
            shuffled = Trajectory(traj.positions[:, perm, :])
            a = combined_complexity(traj, spec)
            b = combined_complexity(shuffled, spec)
            assert a.raw_entropy == pytest.approx(b.raw_entropy, abs=1e-12)
            assert a.mean_min_distance == pytest.approx(b.mean_min_distance, abs=1e-12)
            assert a.combined == pytest.approx(b.combined, abs=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(6)
        for seed in range(20):
            n = int(rng.integers(2, 6))
            pos = rng.uniform(-0.5, 0.5, (12, n, 2))
            shift = rng.uniform(-0.4, 0.4, 2)
            spec = TaskSpec(EnvFamily.NAVIGATION, n, 3, 0.5)
            a = combined_complexity(Trajectory(pos), spec)
            b = combined_complexity(Trajectory(pos + shift), spec)
            assert a.combined == pytest.approx(b.combined, abs=1e-12)
            assert a.entropy == pytest.approx(b.entropy, abs=1e-12)
            assert a.interference == pytest.approx(b.interference, abs=1e-12)

    def test_threshold_monotonicity(self):
        for seed in range(20):
            traj = random_trajectory(25, 4, seed)
            w_small = build_dependency_graph(traj, 0.3).edge_weights
            w_large = build_dependency_graph(traj, 0.7).edge_weights
            assert (w_small <= w_large).all()

    def test_range_clamps(self):
        rng = np.random.default_rng(7)
        for seed in range(30):
            n = int(rng.integers(2, 7))
            traj = random_trajectory(20, n, seed)
            spec = TaskSpec(
                EnvFamily.NAVIGATION, n, int(rng.integers(1, 5)), float(rng.uniform(0, 1))
            )
            score = combined_complexity(traj, spec)
            assert 0.0 <= score.entropy <= 1.0
            assert 0.0 < score.interference <= 1.0
            assert 0.0 <= score.goal_overlap <= 1.0
            assert 0.0 <= score.combined <= 1.0
