"""Core domain types shared across the library.

Positions live in a desk-scale square arena spanning [-1, 1] on both axes.
A trajectory is a dense (T, N, 2) array of agent positions sampled once per
control step; task specifications describe how an environment instance is
built and seeded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

ARENA_LOW = -1.0
ARENA_HIGH = 1.0
MAX_AGENTS = 8
MIN_EPISODE_LENGTH = 10


class EnvFamily(enum.Enum):
    """Built-in environment families."""

    NAVIGATION = "navigation"
    JOINT_TRANSPORT = "joint_transport"

    @classmethod
    def parse(cls, name: str) -> "EnvFamily":
        """Map a family name such as 'navigation' to its enum member."""
        for member in cls:
            if member.value == name:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown environment family {name!r} (expected one of: {valid})")


@dataclass(frozen=True)
class TaskSpec:
    """Declarative description of one multi-agent task instance."""

    family: EnvFamily
    num_agents: int
    num_goals: int
    lambda_local: float
    episode_length: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.num_agents <= MAX_AGENTS:
            raise ValueError(f"num_agents must be in [1, {MAX_AGENTS}], got {self.num_agents}")
        if self.num_goals < 1:
            raise ValueError(f"num_goals must be >= 1, got {self.num_goals}")
        if not 0.0 <= self.lambda_local <= 1.0:
            raise ValueError(f"lambda_local must be in [0, 1], got {self.lambda_local}")
        if self.episode_length < MIN_EPISODE_LENGTH:
            raise ValueError(
                f"episode_length must be >= {MIN_EPISODE_LENGTH}, got {self.episode_length}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class ComplexityScore:
    """Complexity components for one trajectory plus their weighted combination.

    ``entropy`` is the normalized dependency-graph entropy in [0, 1];
    ``raw_entropy`` is the unnormalized value in bits, kept for ablations.
    ``combined`` equals ``weights @ (entropy, interference, goal_overlap)``.
    """

    entropy: float
    interference: float
    goal_overlap: float
    combined: float
    raw_entropy: float
    mean_min_distance: float
    weights: tuple[float, float, float] = (0.4, 0.3, 0.3)


@dataclass
class Trajectory:
    """Dense agent positions over one episode, shape (T, N, 2)."""

    positions: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 2:
            raise ValueError(f"positions must have shape (T, N, 2), got {pos.shape}")
        if pos.shape[0] < 1 or pos.shape[1] < 1:
            raise ValueError(f"positions must contain at least one step and agent, got {pos.shape}")
        if not np.isfinite(pos).all():
            raise ValueError("positions contain non-finite values")
        if pos.min() < ARENA_LOW or pos.max() > ARENA_HIGH:
            raise ValueError(
                f"positions must lie within [{ARENA_LOW}, {ARENA_HIGH}], "
                f"got range [{pos.min()}, {pos.max()}]"
            )
        self.positions = pos

    @property
    def horizon(self) -> int:
        return self.positions.shape[0]

    @property
    def num_agents(self) -> int:
        return self.positions.shape[1]


def save_trajectory(trajectory: Trajectory, path: str) -> None:
    """Write a trajectory as text: a 'N T' header then one line per step.

    Each step line holds 2N reals (x_1 y_1 ... x_N y_N) in shortest
    round-trip decimal form, so load_trajectory recovers the exact floats.
    """
    pos = trajectory.positions
    if not np.isfinite(pos).all():
        raise ValueError("refusing to write trajectory with non-finite coordinates")
    t_steps, n_agents = pos.shape[0], pos.shape[1]
    lines = [f"{n_agents} {t_steps}"]
    for t in range(t_steps):
        lines.append(" ".join(repr(float(v)) for v in pos[t].ravel()))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_trajectory(path: str) -> Trajectory:
    """Read a trajectory written by save_trajectory, validating as it parses."""
    with open(path, "r", encoding="ascii") as fh:
        raw_lines = fh.read().splitlines()
    if not raw_lines:
        raise ValueError(f"{path}: empty trajectory file")

    header = raw_lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}, line 1: header must be 'N T', got {raw_lines[0]!r}")
    try:
        n_agents, t_steps = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"{path}, line 1: header must hold two integers, got {raw_lines[0]!r}")
    if n_agents < 1 or t_steps < 1:
        raise ValueError(f"{path}, line 1: need N >= 1 and T >= 1, got N={n_agents} T={t_steps}")
    if len(raw_lines) - 1 != t_steps:
        raise ValueError(
            f"{path}: header promises {t_steps} step lines, found {len(raw_lines) - 1}"
        )

    positions = np.empty((t_steps, n_agents, 2), dtype=float)
    for t in range(t_steps):
        line_no = t + 2
        fields = raw_lines[t + 1].split()
        if len(fields) != 2 * n_agents:
            raise ValueError(
                f"{path}, line {line_no}: expected {2 * n_agents} values, got {len(fields)}"
            )
        try:
            row = np.array([float(v) for v in fields])
        except ValueError:
            raise ValueError(f"{path}, line {line_no}: non-numeric value in {raw_lines[t + 1]!r}")
        if not np.isfinite(row).all():
            raise ValueError(f"{path}, line {line_no}: non-finite coordinate")
        if row.min() < ARENA_LOW or row.max() > ARENA_HIGH:
            raise ValueError(
                f"{path}, line {line_no}: coordinate outside [{ARENA_LOW}, {ARENA_HIGH}]"
            )
        positions[t] = row.reshape(n_agents, 2)
    return Trajectory(positions)
