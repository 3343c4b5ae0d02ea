"""Minimal multi-agent deterministic-policy-gradient learner.

Each agent owns a small feedforward actor (tanh output) and a centralized
critic (identity output) that sees every agent's observation and action.
Networks are plain numpy with hand-written reverse-mode gradients, trained
by SGD with gradient-norm clipping from a ring replay buffer, with slowly
tracking target copies for the bootstrap targets.

Backprop convention: layers compute Z = A @ W + b with W of shape
(fan_in, fan_out); the backward pass receives dL/dY and returns per-layer
(dW, db) plus dL/dX, summing over the batch axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TaskSpec
from .envs import MultiAgentEnv, make_env, observation_dim

HIDDEN_SIZE = 128
ACTION_DIM = 2


@dataclass(frozen=True)
class MaddpgConfig:
    batch_size: int = 64
    learning_rate: float = 1e-3
    discount: float = 0.95
    soft_update_tau: float = 0.01
    noise_sigma: float = 0.1
    noise_decay: float = 0.999
    noise_floor: float = 0.01
    buffer_capacity: int = 10_000
    grad_clip: float = 1.0
    # 4 gradient steps per env step: measured as the least that lets desk-scale
    # runs master tasks inside curriculum advancement windows
    updates_per_step: float = 4.0

    def __post_init__(self) -> None:
        if not 0.0 < self.discount < 1.0:
            raise ValueError(f"discount must be in (0, 1), got {self.discount}")
        if not 0.0 < self.soft_update_tau <= 1.0:
            raise ValueError(f"soft_update_tau must be in (0, 1], got {self.soft_update_tau}")
        if self.batch_size < 1 or self.buffer_capacity < self.batch_size:
            raise ValueError("need buffer_capacity >= batch_size >= 1")
        if self.updates_per_step <= 0.0:
            raise ValueError(f"updates_per_step must be > 0, got {self.updates_per_step}")


class Mlp:
    """(input, 128, 128, output) feedforward net; relu hidden layers."""

    def __init__(self, layer_sizes: list[int], output_activation: str, rng: np.random.Generator):
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if output_activation not in ("tanh", "identity"):
            raise ValueError(f"unknown output activation {output_activation!r}")
        self.layer_sizes = list(layer_sizes)
        self.output_activation = output_activation
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / math.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, (fan_in, fan_out)))
            self.biases.append(rng.uniform(-bound, bound, fan_out))

    def forward(self, x: np.ndarray) -> np.ndarray:
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Evaluate the net, returning activations of every layer for backward."""
        arr = np.asarray(x, dtype=float)
        squeeze = arr.ndim == 1
        a = arr.reshape(1, -1) if squeeze else arr
        if a.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"input width {a.shape[1]} != expected {self.layer_sizes[0]}")
        cache = [a]
        last = len(self.weights) - 1
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            if l < last:
                a = np.maximum(z, 0.0)
            elif self.output_activation == "tanh":
                a = np.tanh(z)
            else:
                a = z
            cache.append(a)
        return (a[0] if squeeze else a), cache

    def backward(
        self, cache: list[np.ndarray], grad_output: np.ndarray
    ) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """Reverse-mode pass from dL/dY; returns [(dW, db) per layer] and dL/dX."""
        grad = np.asarray(grad_output, dtype=float)
        squeeze = grad.ndim == 1
        g = grad.reshape(1, -1) if squeeze else grad
        if g.shape != cache[-1].reshape(g.shape[0], -1).shape:
            raise ValueError(f"upstream gradient shape {g.shape} != output shape {cache[-1].shape}")
        param_grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(self.weights)  # type: ignore
        last = len(self.weights) - 1
        for l in range(last, -1, -1):
            out = cache[l + 1]
            if l == last and self.output_activation == "tanh":
                g = g * (1.0 - out * out)
            elif l < last:
                g = g * (out > 0.0)
            param_grads[l] = (cache[l].T @ g, g.sum(axis=0))
            g = g @ self.weights[l].T
        return param_grads, (g[0] if squeeze else g)

    def sgd_step(self, param_grads, learning_rate: float, grad_clip: float) -> None:
        """One descent step; gradients jointly rescaled to global norm <= grad_clip."""
        sq = 0.0
        for dw, db in param_grads:
            sq += float((dw * dw).sum()) + float((db * db).sum())
        norm = math.sqrt(sq)
        scale = learning_rate * (grad_clip / norm if norm > grad_clip else 1.0)
        for (w, b), (dw, db) in zip(zip(self.weights, self.biases), param_grads):
            w -= scale * dw
            b -= scale * db

    def copy(self) -> "Mlp":
        dup = Mlp.__new__(Mlp)
        dup.layer_sizes = list(self.layer_sizes)
        dup.output_activation = self.output_activation
        dup.weights = [w.copy() for w in self.weights]
        dup.biases = [b.copy() for b in self.biases]
        return dup


def soft_update(live: Mlp, target: Mlp, tau: float) -> None:
    """Blend target parameters toward the live network: t <- tau*l + (1-tau)*t."""
    if live.layer_sizes != target.layer_sizes:
        raise ValueError("network shapes differ")
    for lw, tw in zip(live.weights, target.weights):
        tw *= 1.0 - tau
        tw += tau * lw
    for lb, tb in zip(live.biases, target.biases):
        tb *= 1.0 - tau
        tb += tau * lb


class ReplayBuffer:
    """Fixed-capacity ring of joint transitions."""

    def __init__(self, capacity: int, num_agents: int, obs_dim: int, act_dim: int = ACTION_DIM):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.observations = np.zeros((capacity, num_agents, obs_dim))
        self.actions = np.zeros((capacity, num_agents, act_dim))
        self.rewards = np.zeros((capacity, num_agents))
        self.next_observations = np.zeros((capacity, num_agents, obs_dim))
        self.dones = np.zeros(capacity)
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, obs, actions, rewards, next_obs, done: bool) -> None:
        i = self._cursor
        self.observations[i] = obs
        self.actions[i] = actions
        self.rewards[i] = rewards
        self.next_observations[i] = next_obs
        self.dones[i] = float(done)
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
        if self._size < batch_size:
            raise ValueError(f"buffer holds {self._size} transitions, need {batch_size}")
        idx = rng.integers(0, self._size, batch_size)
        return {
            "observations": self.observations[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_observations": self.next_observations[idx],
            "dones": self.dones[idx],
        }

    def clear(self) -> None:
        self._cursor = 0
        self._size = 0


class MaddpgAgentSet:
    """Per-agent actors and centralized critics with target copies."""

    def __init__(
        self, num_agents: int, obs_dim: int, act_dim: int = ACTION_DIM,
        config: MaddpgConfig | None = None, seed: int = 0,
    ):
        self.num_agents = num_agents
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.config = config if config is not None else MaddpgConfig()
        rng = np.random.default_rng(seed)
        critic_in = num_agents * (obs_dim + act_dim)
        self.actors = [
            Mlp([obs_dim, HIDDEN_SIZE, HIDDEN_SIZE, act_dim], "tanh", rng)
            for _ in range(num_agents)
        ]
        self.critics = [
            Mlp([critic_in, HIDDEN_SIZE, HIDDEN_SIZE, 1], "identity", rng)
            for _ in range(num_agents)
        ]
        self.target_actors = [net.copy() for net in self.actors]
        self.target_critics = [net.copy() for net in self.critics]

    def act(
        self, observations: np.ndarray, noise_sigma: float = 0.0,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """Actions for the first K agents given their (K, obs_dim) observations."""
        obs = np.asarray(observations, dtype=float)
        if obs.ndim != 2 or obs.shape[1] != self.obs_dim or obs.shape[0] > self.num_agents:
            raise ValueError(
                f"observations must be (K <= {self.num_agents}, {self.obs_dim}), got {obs.shape}"
            )
        actions = np.stack([self.actors[i].forward(obs[i]) for i in range(obs.shape[0])])
        if noise_sigma > 0.0:
            if rng is None:
                raise ValueError("noise_sigma > 0 requires a random generator")
            actions = actions + rng.normal(0.0, noise_sigma, actions.shape)
        return np.clip(actions, -1.0, 1.0)

    def bellman_targets(self, batch: dict[str, np.ndarray], gamma: float) -> np.ndarray:
        """Per-agent critic targets y_i = r_i + gamma * (1 - done) * Q_target, (N, B)."""
        next_obs = batch["next_observations"]
        b = next_obs.shape[0]
        next_obs_flat = next_obs.reshape(b, -1)
        target_acts = np.concatenate(
            [self.target_actors[j].forward(next_obs[:, j]) for j in range(self.num_agents)],
            axis=1,
        )
        critic_in = np.concatenate([next_obs_flat, target_acts], axis=1)
        not_done = 1.0 - batch["dones"]
        targets = np.empty((self.num_agents, b))
        for i in range(self.num_agents):
            q_next = self.target_critics[i].forward(critic_in)[:, 0]
            targets[i] = batch["rewards"][:, i] + gamma * not_done * q_next
        return targets

    def actor_gradient(
        self, agent_index: int, observations: np.ndarray, actions: np.ndarray
    ) -> tuple[list[tuple[np.ndarray, np.ndarray]], float]:
        """Gradients for ascending agent i's mean critic value over the batch.

        Other agents' actions come from the batch; agent i's own are replayed
        through its live actor so the critic's action-slice gradient reaches
        the actor parameters.  Returns descent gradients of -mean(Q) and the
        objective mean(Q) itself.
        """
        i = agent_index
        b = observations.shape[0]
        obs_flat = observations.reshape(b, -1)
        a_i, actor_cache = self.actors[i].forward_cached(observations[:, i])
        acts = actions.copy()
        acts[:, i] = a_i
        q_in = np.concatenate([obs_flat, acts.reshape(b, -1)], axis=1)
        q, critic_cache = self.critics[i].forward_cached(q_in)
        objective = float(q.mean())
        _, d_input = self.critics[i].backward(critic_cache, np.full((b, 1), -1.0 / b))
        offset = self.num_agents * self.obs_dim + i * self.act_dim
        d_action = d_input[:, offset : offset + self.act_dim]
        actor_grads, _ = self.actors[i].backward(actor_cache, d_action)
        return actor_grads, objective

    def update(
        self, buffer: ReplayBuffer, config: MaddpgConfig | None = None,
        rng: np.random.Generator | None = None, num_active: int | None = None,
    ) -> list[tuple[float, float]]:
        """One critic and one actor gradient step per active agent, then soft updates."""
        cfg = config if config is not None else self.config
        rng = rng if rng is not None else np.random.default_rng(0)
        active = self.num_agents if num_active is None else num_active
        batch = buffer.sample(cfg.batch_size, rng)
        obs, acts = batch["observations"], batch["actions"]
        b = obs.shape[0]
        obs_flat = obs.reshape(b, -1)
        acts_flat = acts.reshape(b, -1)
        targets = self.bellman_targets(batch, cfg.discount)
        live_in = np.concatenate([obs_flat, acts_flat], axis=1)
        results: list[tuple[float, float]] = []
        for i in range(active):
            q, cache = self.critics[i].forward_cached(live_in)
            err = q[:, 0] - targets[i]
            critic_loss = float((err * err).mean())
            grads, _ = self.critics[i].backward(cache, (2.0 * err / b)[:, None])
            self.critics[i].sgd_step(grads, cfg.learning_rate, cfg.grad_clip)
            actor_grads, objective = self.actor_gradient(i, obs, acts)
            self.actors[i].sgd_step(actor_grads, cfg.learning_rate, cfg.grad_clip)
            results.append((critic_loss, objective))
        for i in range(active):
            soft_update(self.actors[i], self.target_actors[i], cfg.soft_update_tau)
            soft_update(self.critics[i], self.target_critics[i], cfg.soft_update_tau)
        return results


def save_checkpoint(agents: MaddpgAgentSet, path: str) -> None:
    """Dump every parameter matrix (live and target nets) to one npz file."""
    arrays: dict[str, np.ndarray] = {
        "meta": np.array([agents.num_agents, agents.obs_dim, agents.act_dim], dtype=np.int64)
    }
    groups = {
        "actor": agents.actors,
        "critic": agents.critics,
        "target_actor": agents.target_actors,
        "target_critic": agents.target_critics,
    }
    for name, nets in groups.items():
        for i, net in enumerate(nets):
            for l, (w, bvec) in enumerate(zip(net.weights, net.biases)):
                arrays[f"{name}{i}_w{l}"] = w
                arrays[f"{name}{i}_b{l}"] = bvec
    np.savez(path, **arrays)


def load_checkpoint(path: str, config: MaddpgConfig | None = None) -> MaddpgAgentSet:
    """Rebuild an agent set with parameters bit-identical to the saved ones."""
    data = np.load(path)
    num_agents, obs_dim, act_dim = (int(v) for v in data["meta"])
    agents = MaddpgAgentSet(num_agents, obs_dim, act_dim, config=config, seed=0)
    groups = {
        "actor": agents.actors,
        "critic": agents.critics,
        "target_actor": agents.target_actors,
        "target_critic": agents.target_critics,
    }
    for name, nets in groups.items():
        for i, net in enumerate(nets):
            for l in range(len(net.weights)):
                net.weights[l] = data[f"{name}{i}_w{l}"].copy()
                net.biases[l] = data[f"{name}{i}_b{l}"].copy()
    return agents


class MaddpgLearner:
    """Curriculum-facing wrapper: shape padding, replay, exploration schedule.

    Network shapes are fixed at the suite-wide maxima; narrower tasks run
    with observations and joint actions zero-padded on the right, reusing
    agents in index order.  Only the active agents of the current task are
    trained, so agents beyond a task's count stay freshly initialized until
    a wider task activates them.
    """

    def __init__(self, suite: list[TaskSpec], config: MaddpgConfig | None = None, seed: int = 0):
        if not suite:
            raise ValueError("suite must be non-empty")
        self.config = config if config is not None else MaddpgConfig()
        self.max_agents = max(spec.num_agents for spec in suite)
        self.max_obs_dim = max(observation_dim(spec) for spec in suite)
        self.agents = MaddpgAgentSet(
            self.max_agents, self.max_obs_dim, ACTION_DIM, self.config, seed=seed
        )
        self.buffer = ReplayBuffer(
            self.config.buffer_capacity, self.max_agents, self.max_obs_dim, ACTION_DIM
        )
        self.rng = np.random.default_rng(seed + 1)
        self.noise_sigma = self.config.noise_sigma
        self.current_spec: TaskSpec | None = None
        self._step_count = 0
        self._update_credit = 0.0

    def begin_task(self, spec: TaskSpec) -> None:
        """Switch the active task, clearing replay when the task changes."""
        if spec.num_agents > self.max_agents or observation_dim(spec) > self.max_obs_dim:
            raise ValueError(
                f"task needs {spec.num_agents} agents / obs dim {observation_dim(spec)}, "
                f"suite maxima are {self.max_agents} / {self.max_obs_dim}"
            )
        if self.current_spec is not None and spec != self.current_spec:
            self.buffer.clear()
        self.current_spec = spec

    def _pad_obs(self, observations: np.ndarray, num_active: int) -> np.ndarray:
        padded = np.zeros((self.max_agents, self.max_obs_dim))
        padded[:num_active, : observations.shape[1]] = observations
        return padded

    def run_episode(self, env: MultiAgentEnv) -> tuple[float, bool]:
        """One training episode: act with exploration noise, store, update."""
        if self.current_spec is None:
            raise ValueError("begin_task must be called before run_episode")
        n = env.num_agents
        obs = self._pad_obs(env.reset(), n)
        episode_return = 0.0
        success = False
        done = False
        while not done:
            actions = np.zeros((self.max_agents, ACTION_DIM))
            actions[:n] = self.agents.act(obs[:n], self.noise_sigma, self.rng)
            result = env.step(actions[:n])
            next_obs = self._pad_obs(result.observations, n)
            rewards = np.zeros(self.max_agents)
            rewards[:n] = result.rewards
            self.buffer.push(obs, actions, rewards, next_obs, result.done)
            episode_return += float(result.rewards.sum())
            obs = next_obs
            done, success = result.done, result.success
            self._step_count += 1
            if len(self.buffer) >= self.config.batch_size:
                self._update_credit += self.config.updates_per_step
                while self._update_credit >= 1.0:
                    self.agents.update(self.buffer, self.config, self.rng, num_active=n)
                    self._update_credit -= 1.0
        self.noise_sigma = max(self.config.noise_floor, self.noise_sigma * self.config.noise_decay)
        return episode_return, success

    def train_on_task(self, spec: TaskSpec, episodes: int) -> list[tuple[float, bool]]:
        """Plain single-task training loop; returns per-episode (return, success)."""
        self.begin_task(spec)
        env = make_env(spec)
        return [self.run_episode(env) for _ in range(episodes)]
