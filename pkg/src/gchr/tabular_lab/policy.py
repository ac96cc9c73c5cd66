"""Goal-conditioned tabular policies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ROW_SUM_TOL = 1e-12


@dataclass
class TabularPolicy:
    probs: np.ndarray  # (S, G, A): action distribution per (state, goal)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 3:
            raise ValueError("policy table must be (states, goals, actions)")
        if np.any(self.probs < 0):
            raise ValueError("action probabilities must be non-negative")
        sums = self.probs.sum(axis=2)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            raise ValueError("every (state, goal) action distribution must sum to 1")

    @property
    def n_states(self):
        return self.probs.shape[0]

    @property
    def n_goals(self):
        return self.probs.shape[1]

    @property
    def n_actions(self):
        return self.probs.shape[2]

    def for_goal(self, goal):
        """The (S, A) action-probability slice used when pursuing `goal`."""
        return self.probs[:, goal, :]

    @classmethod
    def uniform(cls, n_states, n_goals, n_actions):
        return cls(np.full((n_states, n_goals, n_actions), 1.0 / n_actions))

    @classmethod
    def random(cls, n_states, n_goals, n_actions, rng):
        return cls(rng.dirichlet(np.ones(n_actions), size=(n_states, n_goals)))
