"""Goal-conditioned environment contract: state-to-goal map, sparse reward,
fixed-horizon episodes.

Episodes always run exactly `horizon` steps; reaching the goal sets the
reward but does not terminate (the usual sparse-reward convention for
goal-reaching benchmarks). Environment dynamics are deterministic given the
rng, so fixed seeds reproduce full episodes bit for bit when the action
noise is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

REWARD_CONVENTIONS = ("zero_one", "neg_one_zero")


@dataclass
class GoalEnvSpec:
    state_dim: int
    action_dim: int
    goal_dim: int
    horizon: int
    success_tolerance: float = 0.05
    reward_convention: str = "zero_one"
    action_noise_std: float = 0.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.success_tolerance <= 0:
            raise ValueError("success_tolerance must be positive")
        if self.action_noise_std < 0:
            raise ValueError("action_noise_std must be non-negative")
        if self.reward_convention not in REWARD_CONVENTIONS:
            raise ValueError(
                f"reward_convention must be one of {REWARD_CONVENTIONS}, "
                f"got {self.reward_convention!r}"
            )


@dataclass
class GoalEnvState:
    state: np.ndarray
    achieved_goal: np.ndarray
    desired_goal: np.ndarray
    step_index: int = 0


def is_success(achieved_goal, desired_goal, tolerance):
    return float(np.linalg.norm(np.asarray(achieved_goal) - np.asarray(desired_goal))) <= tolerance


def sparse_reward(achieved_goal, desired_goal, tolerance, convention="zero_one"):
    hit = is_success(achieved_goal, desired_goal, tolerance)
    if convention == "zero_one":
        return 1.0 if hit else 0.0
    return 0.0 if hit else -1.0


def reward_value_bounds(convention, gamma):
    """Feasible range of discounted returns under a reward convention."""
    if convention == "zero_one":
        return 0.0, 1.0 / (1.0 - gamma)
    return -1.0 / (1.0 - gamma), 0.0


class GoalEnv:
    """Base class for the continuous desk-scale tasks.

    Subclasses implement phi(), _sample_start(), _sample_goal() and
    _dynamics(); this class owns the episode mechanics (action clipping,
    optional Gaussian action noise, reward and termination bookkeeping).
    """

    spec: GoalEnvSpec

    def phi(self, state):
        raise NotImplementedError

    def _sample_start(self, rng):
        raise NotImplementedError

    def _sample_goal(self, rng):
        raise NotImplementedError

    def _dynamics(self, state, action):
        raise NotImplementedError

    def reset(self, rng):
        state = self._sample_start(rng)
        return GoalEnvState(
            state=state,
            achieved_goal=self.phi(state),
            desired_goal=self._sample_goal(rng),
            step_index=0,
        )

    def step(self, env_state, action, rng):
        """Advance one step; returns (next GoalEnvState, reward, done)."""
        spec = self.spec
        if env_state.step_index >= spec.horizon:
            raise RuntimeError("episode is done; reset before stepping again")
        action = np.asarray(action, dtype=np.float64)
        if action.shape != (spec.action_dim,):
            raise ValueError(f"action shape {action.shape} != ({spec.action_dim},)")
        if np.any(np.abs(action) > 1.0 + 1e-9):
            raise ValueError("action components must lie in [-1, 1]")
        if spec.action_noise_std > 0:
            action = action + spec.action_noise_std * rng.standard_normal(spec.action_dim)
        action = np.clip(action, -1.0, 1.0)
        next_state = self._dynamics(env_state.state, action)
        achieved = self.phi(next_state)
        reward = sparse_reward(
            achieved, env_state.desired_goal, spec.success_tolerance, spec.reward_convention
        )
        next_env_state = GoalEnvState(
            state=next_state,
            achieved_goal=achieved,
            desired_goal=env_state.desired_goal,
            step_index=env_state.step_index + 1,
        )
        done = next_env_state.step_index == spec.horizon
        return next_env_state, reward, done

    def _with_spec_overrides(self, **overrides):
        fixed = {"state_dim", "action_dim", "goal_dim"}
        bad = fixed & set(overrides)
        if bad:
            raise ValueError(f"cannot override environment dimensions: {sorted(bad)}")
        self.spec = replace(self.spec, **overrides)
