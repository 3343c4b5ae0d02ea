"""Task ordering and progression control for curriculum training.

A curriculum advances off the current task when a 50-episode success window
clears 0.6, or after 300 episodes regardless, so a stuck learner cannot
stall the run.  Four schedulers order the suite: ascending complexity,
agent-count priority, descending complexity, and seeded random sampling.
"""

from __future__ import annotations

import csv
import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .core import ComplexityScore, TaskSpec
from .envs import MultiAgentEnv, make_env

SUCCESS_WINDOW = 50
SUCCESS_THRESHOLD = 0.6
TIMEOUT_EPISODES = 300


class SchedulerKind(enum.Enum):
    COMPLEXITY_ASCENDING = "complexity"
    PARAMETER_BASED = "parameter"
    REVERSE_COMPLEXITY = "reverse"
    RANDOM_SAMPLING = "random"

    @classmethod
    def parse(cls, name: str) -> "SchedulerKind":
        for member in cls:
            if member.value == name:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown scheduler {name!r} (expected one of: {valid})")


class Decision(enum.Enum):
    STAY = "stay"
    ADVANCED_BY_SUCCESS = "advanced_by_success"
    ADVANCED_BY_TIMEOUT = "advanced_by_timeout"
    FINISHED = "finished"


@dataclass(frozen=True)
class OrderedTask:
    """A suite entry plus its stable position in the original suite."""

    spec: TaskSpec
    score: ComplexityScore
    suite_index: int


def order_tasks(
    suite: list[tuple[TaskSpec, ComplexityScore]], kind: SchedulerKind, seed: int = 0
) -> list[OrderedTask]:
    """Order a scored suite according to the scheduler kind."""
    if not suite:
        raise ValueError("suite must be non-empty")
    tasks = [OrderedTask(spec, score, i) for i, (spec, score) in enumerate(suite)]
    if kind is SchedulerKind.COMPLEXITY_ASCENDING:
        return sorted(tasks, key=lambda t: (t.score.combined, t.spec.num_agents, t.suite_index))
    if kind is SchedulerKind.PARAMETER_BASED:
        return sorted(
            tasks,
            key=lambda t: (t.spec.num_agents, t.spec.num_agents - t.spec.num_goals, t.suite_index),
        )
    if kind is SchedulerKind.REVERSE_COMPLEXITY:
        return sorted(tasks, key=lambda t: (-t.score.combined, t.spec.num_agents, t.suite_index))
    rng = np.random.default_rng(seed)
    return [tasks[i] for i in rng.permutation(len(tasks))]


@dataclass
class CurriculumState:
    """Progression bookkeeping over an ordered task list."""

    ordered_tasks: list[OrderedTask]
    kind: SchedulerKind
    seed: int = 0
    window_size: int = SUCCESS_WINDOW
    success_threshold: float = SUCCESS_THRESHOLD
    timeout: int = TIMEOUT_EPISODES
    current_index: int = 0
    episodes_on_current: int = 0
    success_window: deque = field(init=False)
    task_outcomes: list[tuple[int, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.ordered_tasks:
            raise ValueError("curriculum needs at least one task")
        self.success_window = deque(maxlen=self.window_size)
        self._rng = np.random.default_rng(self.seed)

    @property
    def finished(self) -> bool:
        return self.current_index >= len(self.ordered_tasks)

    @property
    def completion_fraction(self) -> float:
        return self.current_index / len(self.ordered_tasks)

    @property
    def success_completion_fraction(self) -> float:
        """Fraction of tasks mastered via the success rule (timeouts excluded)."""
        mastered = sum(1 for _, outcome in self.task_outcomes if outcome == "success")
        return mastered / len(self.ordered_tasks)

    def current_task(self) -> OrderedTask:
        if self.finished:
            raise ValueError("curriculum already finished")
        return self.ordered_tasks[self.current_index]


def report_episode(state: CurriculumState, success: bool) -> Decision:
    """Record one episode's success flag and apply the advancement rule."""
    if state.finished:
        raise ValueError("curriculum already finished; no further episodes accepted")
    state.success_window.append(bool(success))
    state.episodes_on_current += 1
    window_full = len(state.success_window) == state.window_size
    rate = sum(state.success_window) / max(1, len(state.success_window))
    if window_full and rate > state.success_threshold:
        return _advance(state, "success")
    if state.episodes_on_current >= state.timeout:
        return _advance(state, "timeout")
    return Decision.STAY


def _advance(state: CurriculumState, outcome: str) -> Decision:
    state.task_outcomes.append((state.current_task().suite_index, outcome))
    state.current_index += 1
    state.episodes_on_current = 0
    state.success_window.clear()
    if state.finished:
        return Decision.FINISHED
    if state.kind is SchedulerKind.RANDOM_SAMPLING:
        # resample the order of the not-yet-visited tail
        tail = state.ordered_tasks[state.current_index :]
        perm = state._rng.permutation(len(tail))
        state.ordered_tasks[state.current_index :] = [tail[i] for i in perm]
    return Decision.ADVANCED_BY_SUCCESS if outcome == "success" else Decision.ADVANCED_BY_TIMEOUT


class Learner(Protocol):
    """Anything run_curriculum can drive through episodes."""

    def begin_task(self, spec: TaskSpec) -> None: ...

    def run_episode(self, env: MultiAgentEnv) -> tuple[float, bool]: ...


class ScriptedLearner:
    """Test/baseline learner emitting a fixed success pattern, ignoring the env."""

    def __init__(self, pattern: str):
        if pattern not in ("always_succeed", "always_fail", "alternate"):
            raise ValueError(f"unknown scripted pattern {pattern!r}")
        self.pattern = pattern
        self._count = 0

    def begin_task(self, spec: TaskSpec) -> None:
        pass

    def run_episode(self, env: MultiAgentEnv) -> tuple[float, bool]:
        self._count += 1
        if self.pattern == "always_succeed":
            return 0.0, True
        if self.pattern == "always_fail":
            return 0.0, False
        return 0.0, self._count % 2 == 1


@dataclass
class EpisodeLog:
    episode: int
    task_index: int  # position of the task in the original suite
    task_complexity: float
    episode_return: float
    success: bool
    decision: Decision


@dataclass
class RunLog:
    """Everything a curriculum run produced, ready for CSV serialization."""

    scheduler: SchedulerKind
    seed: int
    budget: int
    num_tasks: int
    episodes: list[EpisodeLog]
    task_outcomes: list[tuple[int, str]]
    completion_fraction: float
    success_completion_fraction: float

    @property
    def episodes_to_first_advance(self) -> int:
        """Episode of the first task advancement; 0 if the run never advanced."""
        for entry in self.episodes:
            if entry.decision is not Decision.STAY:
                return entry.episode
        return 0

    def final_mean_return(self, window: int = 50) -> float:
        """Mean episode return over the last `window` episodes of the run."""
        tail = self.episodes[-window:]
        return float(np.mean([e.episode_return for e in tail])) if tail else 0.0

    def final_task_mean_return(self) -> float:
        """Mean return over episodes spent on the suite's last task.

        Schedulers visit the suite's tasks in different orders, so comparing
        runs on the shared final (hardest, for an ascending suite) task keeps
        the return scales commensurate.  NaN if the run never reached it.
        """
        returns = [e.episode_return for e in self.episodes if e.task_index == self.num_tasks - 1]
        return float(np.mean(returns)) if returns else float("nan")


def run_curriculum(
    suite: list[tuple[TaskSpec, ComplexityScore]],
    kind: SchedulerKind,
    learner: Learner,
    budget_episodes: int,
    seed: int = 0,
    window_size: int = SUCCESS_WINDOW,
    success_threshold: float = SUCCESS_THRESHOLD,
    timeout: int = TIMEOUT_EPISODES,
) -> RunLog:
    """Drive a learner through the ordered suite until budget or completion."""
    if budget_episodes < 1:
        raise ValueError(f"budget_episodes must be >= 1, got {budget_episodes}")
    ordered = order_tasks(suite, kind, seed)
    state = CurriculumState(
        ordered, kind, seed=seed, window_size=window_size,
        success_threshold=success_threshold, timeout=timeout,
    )
    logs: list[EpisodeLog] = []
    env: MultiAgentEnv | None = None
    active_task: OrderedTask | None = None
    for episode in range(1, budget_episodes + 1):
        if state.finished:
            break
        task = state.current_task()
        if active_task is None or task.suite_index != active_task.suite_index:
            env = make_env(task.spec)
            learner.begin_task(task.spec)
            active_task = task
        episode_return, success = learner.run_episode(env)
        decision = report_episode(state, success)
        logs.append(
            EpisodeLog(
                episode=episode,
                task_index=task.suite_index,
                task_complexity=task.score.combined,
                episode_return=episode_return,
                success=success,
                decision=decision,
            )
        )
    return RunLog(
        scheduler=kind,
        seed=seed,
        budget=budget_episodes,
        num_tasks=len(suite),
        episodes=logs,
        task_outcomes=list(state.task_outcomes),
        completion_fraction=state.completion_fraction,
        success_completion_fraction=state.success_completion_fraction,
    )


def write_run_log_csv(run_log: RunLog, path: str) -> None:
    """Serialize per-episode rows: episode, task, complexity, return, success, decision."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "task_index", "task_complexity", "return", "success", "decision"])
        for e in run_log.episodes:
            writer.writerow(
                [
                    e.episode, e.task_index, repr(e.task_complexity),
                    repr(e.episode_return), int(e.success), e.decision.value,
                ]
            )
