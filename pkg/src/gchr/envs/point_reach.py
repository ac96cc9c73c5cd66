"""Free-space point-mass reaching: double integrator on the plane."""

from __future__ import annotations

import numpy as np

from .base import GoalEnv, GoalEnvSpec

DT = 0.1
VELOCITY_CLIP = 1.0
START_JITTER = 0.05
GOAL_RANGE = 1.0


class PointReach2D(GoalEnv):
    """State (x, y, vx, vy); the action is an acceleration in [-1, 1]^2.

    Start near the origin at rest, goal uniform in [-1, 1]^2, horizon 50.
    """

    def __init__(self, **spec_overrides):
        self.spec = GoalEnvSpec(state_dim=4, action_dim=2, goal_dim=2, horizon=50)
        self._with_spec_overrides(**spec_overrides)

    def phi(self, state):
        return np.asarray(state, dtype=np.float64)[:2].copy()

    def _sample_start(self, rng):
        pos = rng.uniform(-START_JITTER, START_JITTER, size=2)
        return np.concatenate([pos, np.zeros(2)])

    def _sample_goal(self, rng):
        return rng.uniform(-GOAL_RANGE, GOAL_RANGE, size=2)

    def _dynamics(self, state, action):
        pos, vel = state[:2], state[2:]
        vel = np.clip(vel + action * DT, -VELOCITY_CLIP, VELOCITY_CLIP)
        return np.concatenate([pos + vel * DT, vel])


def scripted_reach_action(state, goal, kp=6.0, kd=3.5):
    """Proportional-derivative controller toward the goal; the eval oracle."""
    pos, vel = np.asarray(state)[:2], np.asarray(state)[2:]
    return np.clip(kp * (np.asarray(goal) - pos) - kd * vel, -1.0, 1.0)
