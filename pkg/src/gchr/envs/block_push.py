"""Kinematic disc-pushes-disc manipulation on the plane.

The agent disc moves by a commanded velocity; whenever it would overlap
the block disc, the block is displaced along the contact normal so the two
discs end up exactly in contact. The goal is a target block position.
"""

from __future__ import annotations

import numpy as np

from .base import GoalEnv, GoalEnvSpec

DT = 0.1
AGENT_RADIUS = 0.08
BLOCK_RADIUS = 0.08
CONTACT_DIST = AGENT_RADIUS + BLOCK_RADIUS
WORKSPACE = 1.0
AGENT_START = np.array([-0.5, 0.0])
BLOCK_START = np.array([0.0, 0.0])
START_JITTER = 0.05
GOAL_RANGE = 0.7


def resolve_contact(agent_pos, block_pos, fallback_dir):
    """Push the block out of overlap along the agent->block normal.

    If the two centers coincide the push direction falls back to
    `fallback_dir` (the agent's motion direction). Returns the new block
    position, unchanged when there is no overlap.
    """
    offset = block_pos - agent_pos
    dist = float(np.linalg.norm(offset))
    if dist >= CONTACT_DIST:
        return block_pos
    if dist > 1e-12:
        normal = offset / dist
    else:
        norm = float(np.linalg.norm(fallback_dir))
        normal = fallback_dir / norm if norm > 1e-12 else np.array([1.0, 0.0])
    return agent_pos + CONTACT_DIST * normal


class BlockPush2D(GoalEnv):
    """State (agent_x, agent_y, block_x, block_y); phi extracts the block position."""

    def __init__(self, **spec_overrides):
        self.spec = GoalEnvSpec(state_dim=4, action_dim=2, goal_dim=2, horizon=60)
        self._with_spec_overrides(**spec_overrides)

    def phi(self, state):
        return np.asarray(state, dtype=np.float64)[2:4].copy()

    def _sample_start(self, rng):
        agent = AGENT_START + rng.uniform(-START_JITTER, START_JITTER, size=2)
        block = BLOCK_START + rng.uniform(-START_JITTER, START_JITTER, size=2)
        return np.concatenate([agent, block])

    def _sample_goal(self, rng):
        return rng.uniform(-GOAL_RANGE, GOAL_RANGE, size=2)

    def _dynamics(self, state, action):
        agent, block = state[:2], state[2:4]
        new_agent = np.clip(agent + action * DT, -WORKSPACE, WORKSPACE)
        new_block = resolve_contact(new_agent, block, new_agent - agent)
        new_block = np.clip(new_block, -WORKSPACE, WORKSPACE)
        return np.concatenate([new_agent, new_block])
