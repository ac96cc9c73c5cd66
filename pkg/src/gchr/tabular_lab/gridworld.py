"""Fixture builders: gridworlds, random MDPs and trajectory logs."""

from __future__ import annotations

import numpy as np

from ..envs.tabular import TabularGCMDP, tabular_rollout

# action ids: 0 right, 1 left, 2 up, 3 down
GRID_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def make_gridworld(width, height, gamma, walls=(), slip=0.0, phi=None,
                   absorbing_goals=True):
    """Deterministic-or-slippery four-action gridworld over free cells.

    Moving into a wall or off the grid leaves the agent in place. With
    probability `slip` the executed move is uniform over the four
    directions instead of the commanded one. `phi` maps cell index to goal
    id and defaults to the identity (every free cell is its own goal).
    """
    walls = set(walls)
    cells = [(x, y) for y in range(height) for x in range(width) if (x, y) not in walls]
    index = {cell: i for i, cell in enumerate(cells)}
    n_states = len(cells)
    n_actions = 4

    def target(cell, move):
        nxt = (cell[0] + move[0], cell[1] + move[1])
        if nxt in index:
            return index[nxt]
        return index[cell]

    transitions = np.zeros((n_states, n_actions, n_states))
    for cell, s in index.items():
        landings = [target(cell, move) for move in GRID_MOVES]
        for a in range(n_actions):
            transitions[s, a, landings[a]] += 1.0 - slip
            for landing in landings:
                transitions[s, a, landing] += slip / n_actions
    if phi is None:
        phi = np.arange(n_states)
    return TabularGCMDP(transitions, np.asarray(phi), gamma, absorbing_goals=absorbing_goals)


def grid_cells(width, height, walls=()):
    """Free-cell list in the same order make_gridworld indexes states."""
    walls = set(walls)
    return [(x, y) for y in range(height) for x in range(width) if (x, y) not in walls]


def random_mdp(rng, n_states, n_actions, n_goals, gamma, absorbing_goals=True):
    """Dense random MDP; every goal id owns at least one state."""
    transitions = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    phi = np.concatenate([
        np.arange(n_goals),
        rng.integers(0, n_goals, size=n_states - n_goals),
    ])
    rng.shuffle(phi)
    return TabularGCMDP(transitions, phi, gamma, absorbing_goals=absorbing_goals)


def random_walk_log(mdp, n_episodes, horizon, rng, action_probs=None, start_states=None):
    """Uniform-random (or given) walks on the raw dynamics; returns
    (states, actions) pairs for the support analyses."""
    if action_probs is None:
        action_probs = np.full((mdp.n_states, mdp.n_actions), 1.0 / mdp.n_actions)
    logs = []
    for _ in range(n_episodes):
        if start_states is None:
            start = rng.integers(0, mdp.n_states)
        else:
            start = rng.choice(start_states)
        logs.append(tabular_rollout(mdp, action_probs, start, horizon, rng))
    return logs
