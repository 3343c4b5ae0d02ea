"""Desk-scale multi-agent environment families.

Navigation is a loose-coordination task: agents cover goal landmarks and
are only penalized for colliding.  JointTransport is a tight-coordination
task: a payload moves by the team's mean action, but only while every
agent stays within the carry radius, so uncoordinated teams cannot move
it at all.

Physics is deliberately first-order: velocity = action * 0.1, position +=
velocity, positions clamp to the [-1, 1] arena.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import EnvFamily, TaskSpec, Trajectory

STEP_SCALE = 0.1
SPAWN_MARGIN = 0.9
COLLISION_RADIUS = 0.1
SUCCESS_RADIUS = 0.1
CARRY_RADIUS = 0.3  # all agents must stay this close for the payload to move
MAX_SUITE_SIZE = 64

# JointTransport spawn geometry: team starts holding the payload, target a
# short march away.  Random action noise cannot keep the team coupled long
# enough to cover that distance, which is what makes the family "tight".
PAYLOAD_SPAWN_BOX = 0.3
TARGET_DIST_RANGE = (0.4, 0.6)
AGENT_RING_RANGE = (0.05, 0.2)

Policy = Callable[[np.ndarray], np.ndarray]


def observation_dim(spec: TaskSpec) -> int:
    """Per-agent observation width: own pos+vel, goal offsets, other agents."""
    base = 4 + 2 * spec.num_goals + 2 * (spec.num_agents - 1)
    return base + 2 if spec.family is EnvFamily.JOINT_TRANSPORT else base


@dataclass
class EnvState:
    """Snapshot of one environment instance."""

    agent_positions: np.ndarray  # (N, 2)
    agent_velocities: np.ndarray  # (N, 2)
    goal_positions: np.ndarray  # (G, 2)
    payload_position: np.ndarray | None  # (2,) for JointTransport, else None
    step_count: int


@dataclass
class StepResult:
    observations: np.ndarray  # (N, obs_dim)
    rewards: np.ndarray  # (N,)
    done: bool
    success: bool


class MultiAgentEnv:
    """Common plumbing for both families; subclasses fill in the mechanics."""

    def __init__(self, spec: TaskSpec):
        self.spec = spec
        self._rng = np.random.default_rng(spec.seed)
        self._positions = np.zeros((spec.num_agents, 2))
        self._velocities = np.zeros((spec.num_agents, 2))
        self._goals = np.zeros((spec.num_goals, 2))
        self._step_count = 0
        self._payload: np.ndarray | None = None
        # A leading fraction lambda_local of goals is privately owned by the
        # nearest agent at spawn; ownership is structural metadata (it feeds
        # the goal-overlap term), rewards themselves are ownership-agnostic.
        self.goal_owner = np.full(spec.num_goals, -1, dtype=int)

    @property
    def num_agents(self) -> int:
        return self.spec.num_agents

    @property
    def observation_dim(self) -> int:
        return observation_dim(self.spec)

    @property
    def state(self) -> EnvState:
        return EnvState(
            agent_positions=self._positions.copy(),
            agent_velocities=self._velocities.copy(),
            goal_positions=self._goals.copy(),
            payload_position=None if self._payload is None else self._payload.copy(),
            step_count=self._step_count,
        )

    def reset(self) -> np.ndarray:
        self._spawn()
        self._velocities[:] = 0.0
        self._step_count = 0
        num_private = int(round(self.spec.lambda_local * self.spec.num_goals))
        self.goal_owner[:] = -1
        for g in range(num_private):
            dists = np.linalg.norm(self._positions - self._goals[g], axis=1)
            self.goal_owner[g] = int(np.argmin(dists))
        return self._observations()

    def step(self, actions: np.ndarray) -> StepResult:
        if self._step_count >= self.spec.episode_length:
            raise ValueError("episode is over; call reset before stepping again")
        acts = np.asarray(actions, dtype=float)
        if acts.shape != (self.num_agents, 2):
            raise ValueError(f"actions must have shape ({self.num_agents}, 2), got {acts.shape}")
        if np.abs(acts).max() > 1.0:
            raise ValueError(f"action components must lie in [-1, 1], got max |a| = {np.abs(acts).max()}")
        pre_move_positions = self._positions.copy()
        self._velocities = acts * STEP_SCALE
        self._positions = np.clip(self._positions + self._velocities, -1.0, 1.0)
        self._step_count += 1
        rewards, success = self._score(acts, pre_move_positions)
        done = success or self._step_count >= self.spec.episode_length
        return StepResult(self._observations(), rewards, done, success)

    # subclass hooks
    def _spawn(self) -> None:
        raise NotImplementedError

    def _score(self, actions: np.ndarray, pre_move_positions: np.ndarray) -> tuple[np.ndarray, bool]:
        raise NotImplementedError

    def _base_observation(self, i: int) -> list[np.ndarray]:
        others = np.delete(self._positions, i, axis=0) - self._positions[i]
        return [
            self._positions[i],
            self._velocities[i],
            (self._goals - self._positions[i]).ravel(),
            others.ravel(),
        ]

    def _observations(self) -> np.ndarray:
        raise NotImplementedError


class NavigationEnv(MultiAgentEnv):
    """Cover every goal; stay out of each other's way."""

    def _spawn(self) -> None:
        self._positions = self._rng.uniform(-SPAWN_MARGIN, SPAWN_MARGIN, (self.num_agents, 2))
        self._goals = self._rng.uniform(-SPAWN_MARGIN, SPAWN_MARGIN, (self.spec.num_goals, 2))

    def _score(self, actions: np.ndarray, pre_move_positions: np.ndarray) -> tuple[np.ndarray, bool]:
        # (G, N) distances from every goal to every agent
        dists = np.linalg.norm(self._goals[:, None, :] - self._positions[None, :, :], axis=2)
        per_goal_min = dists.min(axis=1)
        dist_term = per_goal_min.sum() / self.spec.num_goals
        collided = np.zeros(self.num_agents)
        if self.num_agents > 1:
            pair = np.linalg.norm(self._positions[:, None, :] - self._positions[None, :, :], axis=2)
            np.fill_diagonal(pair, np.inf)
            collided = (pair.min(axis=1) < COLLISION_RADIUS).astype(float)
        rewards = -dist_term - 0.5 * collided
        success = bool((per_goal_min <= SUCCESS_RADIUS).all())
        return rewards, success

    def _observations(self) -> np.ndarray:
        return np.stack(
            [np.concatenate(self._base_observation(i)) for i in range(self.num_agents)]
        )


class JointTransportEnv(MultiAgentEnv):
    """Carry a payload to the target; it only moves while the whole team holds it."""

    def _spawn(self) -> None:
        self._payload = self._rng.uniform(-PAYLOAD_SPAWN_BOX, PAYLOAD_SPAWN_BOX, 2)
        angle = self._rng.uniform(0.0, 2.0 * np.pi)
        radius = self._rng.uniform(*TARGET_DIST_RANGE)
        target = self._payload + radius * np.array([np.cos(angle), np.sin(angle)])
        self._goals = self._rng.uniform(-SPAWN_MARGIN, SPAWN_MARGIN, (self.spec.num_goals, 2))
        self._goals[0] = np.clip(target, -SPAWN_MARGIN, SPAWN_MARGIN)
        angles = self._rng.uniform(0.0, 2.0 * np.pi, self.num_agents)
        radii = self._rng.uniform(*AGENT_RING_RANGE, self.num_agents)
        offsets = radii[:, None] * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        self._positions = np.clip(self._payload + offsets, -SPAWN_MARGIN, SPAWN_MARGIN)

    def _score(self, actions: np.ndarray, pre_move_positions: np.ndarray) -> tuple[np.ndarray, bool]:
        assert self._payload is not None
        grip = np.linalg.norm(pre_move_positions - self._payload, axis=1)
        if (grip <= CARRY_RADIUS).all():
            self._payload = np.clip(self._payload + STEP_SCALE * actions.mean(axis=0), -1.0, 1.0)
        target_dist = float(np.linalg.norm(self._payload - self._goals[0]))
        disagreement = 0.0
        if self.num_agents > 1:
            diffs = np.linalg.norm(actions[:, None, :] - actions[None, :, :], axis=2)
            iu = np.triu_indices(self.num_agents, k=1)
            disagreement = float(diffs[iu].mean())
        rewards = np.full(self.num_agents, -target_dist - 0.2 * disagreement)
        success = target_dist <= SUCCESS_RADIUS
        return rewards, success

    def _observations(self) -> np.ndarray:
        assert self._payload is not None
        rows = []
        for i in range(self.num_agents):
            parts = self._base_observation(i)
            parts.append(self._payload - self._positions[i])
            rows.append(np.concatenate(parts))
        return np.stack(rows)


def make_env(spec: TaskSpec) -> MultiAgentEnv:
    """Build the environment instance a TaskSpec describes."""
    if spec.family is EnvFamily.NAVIGATION:
        return NavigationEnv(spec)
    if spec.family is EnvFamily.JOINT_TRANSPORT:
        if spec.num_agents < 2:
            raise ValueError("joint transport needs at least two agents")
        return JointTransportEnv(spec)
    raise ValueError(f"unsupported environment family: {spec.family}")


def derive_seed(base_seed: int, index: int) -> int:
    """Stable per-task seed from a suite's base seed and sweep position."""
    return base_seed * 100003 + index


def generate_task_suite(base: TaskSpec, sweep: dict[str, list]) -> list[TaskSpec]:
    """Cartesian product of swept TaskSpec fields, in sweep-key insertion order."""
    allowed = {"family", "num_agents", "num_goals", "lambda_local", "episode_length"}
    if not sweep:
        raise ValueError("sweep must name at least one parameter")
    unknown = set(sweep) - allowed
    if unknown:
        raise ValueError(f"unknown sweep parameters: {sorted(unknown)}")
    keys = list(sweep)
    for key in keys:
        if len(sweep[key]) == 0:
            raise ValueError(f"sweep range for {key!r} is empty")
    combos = list(itertools.product(*(sweep[k] for k in keys)))
    if len(combos) > MAX_SUITE_SIZE:
        raise ValueError(f"sweep produces {len(combos)} tasks, limit is {MAX_SUITE_SIZE}")
    suite = []
    for idx, combo in enumerate(combos):
        fields = {
            "family": base.family,
            "num_agents": base.num_agents,
            "num_goals": base.num_goals,
            "lambda_local": base.lambda_local,
            "episode_length": base.episode_length,
        }
        fields.update(dict(zip(keys, combo)))
        if isinstance(fields["family"], str):
            fields["family"] = EnvFamily.parse(fields["family"])
        suite.append(TaskSpec(seed=derive_seed(base.seed, idx), **fields))
    return suite


def random_policy(num_agents: int, rng: np.random.Generator) -> Policy:
    """Uniform-random actions in [-1, 1]^2, drawn from the given generator."""

    def policy(observations: np.ndarray) -> np.ndarray:
        return rng.uniform(-1.0, 1.0, (num_agents, 2))

    return policy


def record_rollout(env: MultiAgentEnv, policy: Policy, episodes: int) -> list[Trajectory]:
    """Roll episodes under a policy, capturing positions at every step incl. t=0."""
    if episodes < 1:
        raise ValueError(f"episodes must be >= 1, got {episodes}")
    trajectories = []
    for _ in range(episodes):
        observations = env.reset()
        frames = [env.state.agent_positions]
        done = False
        while not done:
            result = env.step(policy(observations))
            observations = result.observations
            frames.append(env.state.agent_positions)
            done = result.done
        trajectories.append(Trajectory(np.stack(frames)))
    return trajectories


def validation_suite(base_seed: int = 0) -> list[TaskSpec]:
    """Fifteen-task suite spanning both families for metric validation.

    Navigation covers team sizes 2 through 8 (loosely coupled crowds); the
    transport tasks cover the same sizes at horizons 100 and 150 (tightly
    coupled teams). Transport is strictly harder than navigation here, which
    raw pairwise entropy alone gets wrong for large navigation crowds.
    """
    nav_base = TaskSpec(
        family=EnvFamily.NAVIGATION,
        num_agents=2,
        num_goals=4,
        lambda_local=1.0,
        episode_length=50,
        seed=base_seed,
    )
    nav = generate_task_suite(nav_base, {"num_agents": [2, 3, 4, 5, 6, 8]})
    jt_base = TaskSpec(
        family=EnvFamily.JOINT_TRANSPORT,
        num_agents=3,
        num_goals=1,
        lambda_local=0.0,
        episode_length=100,
        seed=base_seed + 1,
    )
    jt = generate_task_suite(jt_base, {"num_agents": [3, 4, 5, 6, 7, 8]})
    jt_long_base = TaskSpec(
        family=EnvFamily.JOINT_TRANSPORT,
        num_agents=3,
        num_goals=1,
        lambda_local=0.0,
        episode_length=150,
        seed=base_seed + 2,
    )
    jt_long = generate_task_suite(jt_long_base, {"num_agents": [3, 5, 8]})
    return nav + jt + jt_long


def transport_suite(base_seed: int = 0) -> list[TaskSpec]:
    """Five transport tasks that get harder as the carrying team grows."""
    base = TaskSpec(
        family=EnvFamily.JOINT_TRANSPORT,
        num_agents=2,
        num_goals=1,
        lambda_local=0.0,
        seed=base_seed,
    )
    return generate_task_suite(base, {"num_agents": [2, 3, 4, 5, 6]})
