"""Exact evaluation and improvement of tabular goal-conditioned policies.

All values use the goal-absorbing formulation with reward r(s) = 1{phi(s)=g}
collected at every timestep from t = 0 on, so a state already satisfying the
goal is worth exactly 1/(1-gamma). Direct evaluation solves the Bellman
linear system by dense elimination; the iterative variant repeats Bellman
backups and exists as an independent cross-check route.
"""

from __future__ import annotations

import numpy as np


def reward_vector(mdp, goal):
    return (mdp.phi == goal).astype(np.float64)


def policy_transition_matrix(mdp, policy, goal):
    """State-to-state matrix under the goal-absorbing dynamics and the
    policy's slice for that goal."""
    p_eff = mdp.effective_transitions(goal)
    return np.einsum("sa,sax->sx", policy.for_goal(goal), p_eff)


def policy_evaluation_direct(mdp, policy, goal):
    """Exact (Q, V) for one goal via a dense linear solve."""
    if not mdp.absorbing_goals:
        raise ValueError("evaluation requires the goal-absorbing formulation")
    r = reward_vector(mdp, goal)
    p_pi = policy_transition_matrix(mdp, policy, goal)
    n = mdp.n_states
    v = np.linalg.solve(np.eye(n) - mdp.gamma * p_pi, r)
    p_eff = mdp.effective_transitions(goal)
    q = r[:, None] + mdp.gamma * np.einsum("sax,x->sa", p_eff, v)
    return q, v


def policy_evaluation_iterative(mdp, policy, goal, tol=1e-12, max_iters=200_000):
    """Fixed-point iteration of the Bellman expectation backup on Q.

    Independent of the direct solve; iterates until the sup-norm update
    falls below tol (final error is at most tol * gamma / (1 - gamma)).
    """
    if not mdp.absorbing_goals:
        raise ValueError("evaluation requires the goal-absorbing formulation")
    r = reward_vector(mdp, goal)
    p_eff = mdp.effective_transitions(goal)
    pi = policy.for_goal(goal)
    q = np.zeros((mdp.n_states, mdp.n_actions))
    for _ in range(max_iters):
        v = (pi * q).sum(axis=1)
        q_next = r[:, None] + mdp.gamma * np.einsum("sax,x->sa", p_eff, v)
        delta = float(np.max(np.abs(q_next - q)))
        q = q_next
        if delta <= tol:
            break
    else:
        raise RuntimeError("policy evaluation did not converge")
    v = (pi * q).sum(axis=1)
    return q, v


def greedy_policy_slice(q):
    """One-hot greedy (S, A) slice; ties break toward the lowest action id."""
    n_states, n_actions = q.shape
    out = np.zeros((n_states, n_actions))
    out[np.arange(n_states), np.argmax(q, axis=1)] = 1.0
    return out


def policy_iteration_step(mdp, policy):
    """One exact policy-improvement sweep across every goal slice.

    Returns (improved TabularPolicy, per-goal V of the *input* policy).
    By the policy improvement theorem the returned policy's value dominates
    the input's pointwise, for every goal.
    """
    from .policy import TabularPolicy

    probs = np.empty_like(policy.probs)
    values = np.empty((mdp.n_states, policy.n_goals))
    for g in range(policy.n_goals):
        q, v = policy_evaluation_direct(mdp, policy, g)
        probs[:, g, :] = greedy_policy_slice(q)
        values[:, g] = v
    return TabularPolicy(probs), values
