"""Trajectory replay buffer with hindsight goal relabeling.

Stored trajectories keep their full achieved-goal sequence, so a sampled
transition can be relabeled with any goal the trajectory actually reached
at or after that timestep (the future strategy) or with its final achieved
goal. Rewards are always recomputed from the achieved goal of the
transition's destination state against the sample's effective goal.

Transitions are mirrored into flat preallocated arrays so minibatch
sampling is fully vectorized; eviction is FIFO over whole trajectories
once the transition capacity is exceeded.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

HER_STRATEGIES = ("future", "final")


@dataclass
class Trajectory:
    """One episode: T+1 states, T actions, T+1 achieved goals, one desired goal."""

    states: np.ndarray
    actions: np.ndarray
    achieved_goals: np.ndarray
    desired_goal: np.ndarray

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.float64)
        self.actions = np.asarray(self.actions, dtype=np.float64)
        self.achieved_goals = np.asarray(self.achieved_goals, dtype=np.float64)
        self.desired_goal = np.asarray(self.desired_goal, dtype=np.float64)
        if self.states.ndim != 2 or self.actions.ndim != 2 or self.achieved_goals.ndim != 2:
            raise ValueError("states, actions and achieved_goals must be 2-D arrays")
        if len(self.states) != len(self.actions) + 1:
            raise ValueError(
                f"{len(self.states)} states require {len(self.states) - 1} actions, "
                f"got {len(self.actions)}"
            )
        if len(self.achieved_goals) != len(self.states):
            raise ValueError("need one achieved goal per state")
        if self.desired_goal.shape != (self.achieved_goals.shape[1],):
            raise ValueError("desired goal dimension must match achieved goals")

    @property
    def horizon(self):
        return len(self.actions)

    def check_phi(self, phi):
        """Verify achieved_goals[i] == phi(states[i]) for a given goal map."""
        for s, ag in zip(self.states, self.achieved_goals):
            if not np.allclose(phi(s), ag, atol=1e-12):
                raise ValueError("achieved goals inconsistent with the state-to-goal map")


@dataclass
class HerConfig:
    strategy: str = "future"
    relabel_ratio: float = 0.8
    hindsight_goal_fraction: float = 1.0

    def __post_init__(self):
        if self.strategy not in HER_STRATEGIES:
            raise ValueError(f"strategy must be one of {HER_STRATEGIES}")
        if not 0.0 <= self.relabel_ratio <= 1.0:
            raise ValueError("relabel_ratio must lie in [0, 1]")
        if not 0.0 < self.hindsight_goal_fraction <= 1.0:
            raise ValueError("hindsight_goal_fraction must lie in (0, 1]")


@dataclass
class RelabeledSample:
    state: np.ndarray
    action: np.ndarray
    next_state: np.ndarray
    original_goal: np.ndarray
    goal: np.ndarray  # effective goal: relabeled when is_relabeled, else original
    reward: float
    is_relabeled: bool
    t: int
    relabel_t: int  # index t' of the relabeling goal within the trajectory, -1 if none
    trajectory: Trajectory


class ReplayBatch:
    """Array-of-struct view over a sampled minibatch."""

    def __init__(self, states, actions, next_states, original_goals, goals, rewards,
                 is_relabeled, t, relabel_t, trajectories, goal_sets):
        self.states = states
        self.actions = actions
        self.next_states = next_states
        self.original_goals = original_goals
        self.goals = goals
        self.rewards = rewards
        self.is_relabeled = is_relabeled
        self.t = t
        self.relabel_t = relabel_t
        self.trajectories = trajectories
        self.goal_sets = goal_sets

    def __len__(self):
        return len(self.states)

    def sample(self, i):
        return RelabeledSample(
            state=self.states[i],
            action=self.actions[i],
            next_state=self.next_states[i],
            original_goal=self.original_goals[i],
            goal=self.goals[i],
            reward=float(self.rewards[i]),
            is_relabeled=bool(self.is_relabeled[i]),
            t=int(self.t[i]),
            relabel_t=int(self.relabel_t[i]),
            trajectory=self.trajectories[i],
        )

    def __iter__(self):
        return (self.sample(i) for i in range(len(self)))

    def relabeled_subset(self):
        """New batch containing only the relabeled samples."""
        idx = np.flatnonzero(self.is_relabeled)
        return ReplayBatch(
            self.states[idx], self.actions[idx], self.next_states[idx],
            self.original_goals[idx], self.goals[idx], self.rewards[idx],
            self.is_relabeled[idx], self.t[idx], self.relabel_t[idx],
            [self.trajectories[i] for i in idx], [self.goal_sets[i] for i in idx],
        )


def hindsight_goal_set(trajectory, dedup_tol=0.0):
    """Achieved goals of every timestep, deduplicated, first-visit order.

    Two goals are duplicates when their distance is <= dedup_tol (0 keeps
    only exact repeats out).
    """
    kept = []
    for g in trajectory.achieved_goals:
        if all(np.linalg.norm(g - k) > dedup_tol for k in kept):
            kept.append(g)
    return np.array(kept)


def sample_hindsight_goals(trajectory, k, rng, dedup_tol=0.0, goal_set=None):
    """Draw k goals uniformly from the trajectory's hindsight goal set.

    Without replacement when k <= |set|, with replacement otherwise.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    goals = goal_set if goal_set is not None else hindsight_goal_set(trajectory, dedup_tol)
    n = len(goals)
    idx = rng.choice(n, size=k, replace=k > n)
    return goals[idx]


class _StoredTrajectory:
    __slots__ = ("trajectory", "goal_set", "base")

    def __init__(self, trajectory, goal_set, base):
        self.trajectory = trajectory
        self.goal_set = goal_set
        self.base = base  # offset of this trajectory's state 0 in the flat arrays


class HerBuffer:
    """FIFO trajectory store with vectorized hindsight relabeling."""

    def __init__(self, state_dim, action_dim, goal_dim, success_tolerance,
                 reward_convention="zero_one", capacity=1_000_000, goal_dedup_tol=None):
        self.state_dim = int(state_dim)
        self.action_dim = int(action_dim)
        self.goal_dim = int(goal_dim)
        self.success_tolerance = float(success_tolerance)
        self.reward_convention = reward_convention
        self.capacity = int(capacity)
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        # dedup tolerance for hindsight goal sets defaults to tolerance / 10
        self.goal_dedup_tol = (
            self.success_tolerance / 10.0 if goal_dedup_tol is None else float(goal_dedup_tol)
        )
        self._records: list[_StoredTrajectory] = []
        self._n_transitions = 0
        self._flat_alloc = 0
        self._fill = 0  # rows used in the state/goal flat arrays (T+1 per trajectory)
        self._index_dirty = True
        self._lengths = np.empty(0, dtype=np.int64)
        self._cumulative = np.empty(0, dtype=np.int64)
        self._bases = np.empty(0, dtype=np.int64)

    # -- storage ------------------------------------------------------------

    def __len__(self):
        return self._n_transitions

    @property
    def n_transitions(self):
        return self._n_transitions

    @property
    def n_trajectories(self):
        return len(self._records)

    def trajectories(self):
        return [rec.trajectory for rec in self._records]

    def _ensure_alloc(self, extra_rows):
        if self._flat_alloc == 0:
            # capacity counts transitions; the flat arrays hold T+1 rows per
            # trajectory, so leave ~25% headroom before compacting
            self._flat_alloc = int(self.capacity * 1.25) + 2 * extra_rows + 4
            self._states = np.empty((self._flat_alloc, self.state_dim))
            self._actions = np.empty((self._flat_alloc, self.action_dim))
            self._achieved = np.empty((self._flat_alloc, self.goal_dim))
            self._desired = np.empty((self._flat_alloc, self.goal_dim))
        if self._fill + extra_rows > self._flat_alloc:
            self._compact()

    def _compact(self):
        shift = self._records[0].base if self._records else self._fill
        keep = self._fill - shift
        for arr in (self._states, self._actions, self._achieved, self._desired):
            arr[:keep] = arr[shift : self._fill]
        for rec in self._records:
            rec.base -= shift
        self._fill = keep
        self._index_dirty = True

    def _refresh_index(self):
        if self._index_dirty:
            self._lengths = np.array([rec.trajectory.horizon for rec in self._records],
                                     dtype=np.int64)
            self._cumulative = np.cumsum(self._lengths)
            self._bases = np.array([rec.base for rec in self._records], dtype=np.int64)
            self._index_dirty = False

    def store_trajectory(self, trajectory):
        if not isinstance(trajectory, Trajectory):
            trajectory = Trajectory(*trajectory)
        if trajectory.states.shape[1] != self.state_dim:
            raise ValueError("trajectory state dim does not match buffer")
        if trajectory.actions.shape[1] != self.action_dim:
            raise ValueError("trajectory action dim does not match buffer")
        if trajectory.achieved_goals.shape[1] != self.goal_dim:
            raise ValueError("trajectory goal dim does not match buffer")
        horizon = trajectory.horizon
        if horizon < 1:
            raise ValueError("trajectory must contain at least one transition")
        # FIFO eviction before inserting so capacity bounds the stored count
        while self._records and self._n_transitions + horizon > self.capacity:
            evicted = self._records.pop(0)
            self._n_transitions -= evicted.trajectory.horizon
            self._index_dirty = True
        rows = horizon + 1
        self._ensure_alloc(rows)
        base = self._fill
        self._states[base : base + rows] = trajectory.states
        self._achieved[base : base + rows] = trajectory.achieved_goals
        self._actions[base : base + horizon] = trajectory.actions
        self._desired[base : base + rows] = trajectory.desired_goal
        self._fill += rows
        goal_set = hindsight_goal_set(trajectory, self.goal_dedup_tol)
        self._records.append(_StoredTrajectory(trajectory, goal_set, base))
        self._n_transitions += horizon
        self._index_dirty = True

    # -- sampling -----------------------------------------------------------

    def _reward(self, achieved_next, goals):
        hit = np.linalg.norm(achieved_next - goals, axis=-1) <= self.success_tolerance
        if self.reward_convention == "zero_one":
            return hit.astype(np.float64)
        return hit.astype(np.float64) - 1.0

    def sample_batch(self, batch_size, her, rng):
        """Uniform over stored transitions, each independently relabeled
        with probability her.relabel_ratio."""
        if self._n_transitions == 0:
            raise ValueError("cannot sample from an empty buffer")
        if batch_size < 1:
            raise ValueError("batch_size must be positive")
        self._refresh_index()
        lengths = self._lengths
        cumulative = self._cumulative
        flat_idx = rng.integers(0, self._n_transitions, size=batch_size)
        traj_idx = np.searchsorted(cumulative, flat_idx, side="right")
        t = flat_idx - (cumulative[traj_idx] - lengths[traj_idx])
        bases = self._bases[traj_idx]

        relabel = rng.random(batch_size) < her.relabel_ratio
        if her.strategy == "future":
            relabel_t = rng.integers(t, lengths[traj_idx] + 1)  # uniform over [t, T]
        else:
            relabel_t = lengths[traj_idx].copy()
        relabel_t = np.where(relabel, relabel_t, -1)

        states = self._states[bases + t]
        actions = self._actions[bases + t]
        next_states = self._states[bases + t + 1]
        achieved_next = self._achieved[bases + t + 1]
        original_goals = self._desired[bases]
        goals = original_goals.copy()
        if np.any(relabel):
            ridx = np.flatnonzero(relabel)
            goals[ridx] = self._achieved[bases[ridx] + relabel_t[ridx]]
        rewards = self._reward(achieved_next, goals)
        return ReplayBatch(
            states=states,
            actions=actions,
            next_states=next_states,
            original_goals=original_goals,
            goals=goals,
            rewards=rewards,
            is_relabeled=relabel,
            t=t,
            relabel_t=relabel_t,
            trajectories=[self._records[i].trajectory for i in traj_idx],
            goal_sets=[self._records[i].goal_set for i in traj_idx],
        )


def dump_trajectories_csv(trajectories, path):
    """Write one row per transition: episode, t, state, action, achieved
    goal of the destination state, desired goal.

    The last row of each episode therefore carries the terminal achieved
    goal, which is what the goal-coverage analysis consumes.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("no trajectories to dump")
    first = trajectories[0]
    header = (
        ["episode", "t"]
        + [f"state_{i}" for i in range(first.states.shape[1])]
        + [f"action_{i}" for i in range(first.actions.shape[1])]
        + [f"achieved_{i}" for i in range(first.achieved_goals.shape[1])]
        + [f"desired_{i}" for i in range(first.achieved_goals.shape[1])]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for episode, traj in enumerate(trajectories):
            for t in range(traj.horizon):
                writer.writerow(
                    [episode, t]
                    + [repr(float(v)) for v in traj.states[t]]
                    + [repr(float(v)) for v in traj.actions[t]]
                    + [repr(float(v)) for v in traj.achieved_goals[t + 1]]
                    + [repr(float(v)) for v in traj.desired_goal]
                )
