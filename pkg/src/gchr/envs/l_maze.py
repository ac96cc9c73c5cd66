"""L-shaped corridor maze for the same point mass as PointReach2D.

The free space is the union of a bottom strip and a right strip on the unit
square; the agent starts in the bottom-left corner and desired goals are
drawn from the top-right region, so reaching them requires traversing the
whole corridor. Wall collisions project the motion onto the free space
axis by axis and zero the blocked velocity component.
"""

from __future__ import annotations

import numpy as np

from .base import GoalEnv, GoalEnvSpec
from .point_reach import DT, VELOCITY_CLIP

# free space: bottom strip on [0,1] x [0, 0.4] plus right strip on [0.6, 1] x [0, 1]
BOTTOM_STRIP = (0.0, 1.0, 0.0, 0.4)
RIGHT_STRIP = (0.6, 1.0, 0.0, 1.0)
START_BOX = (0.08, 0.22, 0.08, 0.22)
GOAL_BOX = (0.68, 0.95, 0.68, 0.95)


def _in_box(p, box):
    x0, x1, y0, y1 = box
    return x0 <= p[0] <= x1 and y0 <= p[1] <= y1


def in_free_space(p):
    return _in_box(p, BOTTOM_STRIP) or _in_box(p, RIGHT_STRIP)


class LMaze2D(GoalEnv):
    """State (x, y, vx, vy); acceleration control, horizon 100."""

    def __init__(self, **spec_overrides):
        self.spec = GoalEnvSpec(state_dim=4, action_dim=2, goal_dim=2, horizon=100)
        self._with_spec_overrides(**spec_overrides)

    def phi(self, state):
        return np.asarray(state, dtype=np.float64)[:2].copy()

    def _sample_start(self, rng):
        x0, x1, y0, y1 = START_BOX
        pos = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
        return np.concatenate([pos, np.zeros(2)])

    def _sample_goal(self, rng):
        x0, x1, y0, y1 = GOAL_BOX
        return np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])

    def _dynamics(self, state, action):
        pos, vel = state[:2].copy(), state[2:]
        vel = np.clip(vel + action * DT, -VELOCITY_CLIP, VELOCITY_CLIP)
        target = pos + vel * DT
        if in_free_space(target):
            pos = target
        else:
            # slide along walls: keep whichever axis motion stays free
            moved_x = np.array([target[0], pos[1]])
            moved_y = np.array([pos[0], target[1]])
            vel = vel.copy()
            if in_free_space(moved_x):
                pos = moved_x
                vel[1] = 0.0
            elif in_free_space(moved_y):
                pos = moved_y
                vel[0] = 0.0
            else:
                vel[:] = 0.0
        return np.concatenate([pos, vel])


def goal_region_contains(goal):
    """True if a goal lies inside the desired top-right sampling region."""
    return _in_box(np.asarray(goal), GOAL_BOX)
