"""Verification report for a tabular MDP file: every lab identity, with margins."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .assumption import check_assumption_uniform_reachability
from .monotonic import check_theorem2_monotonicity
from .occupancy import HIT_MASS_FLOOR, compute_occupancy, q_from_occupancy
from .policy import TabularPolicy
from .solve import policy_evaluation_iterative
from .monotonic import MonotonicityReport  # noqa: F401  (re-exported for callers)


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    tolerance: float
    detail: str = ""


def verify_tabular(mdp, seed=0, n_policies=3, pi_sweeps=4, delta=1e-9):
    """Run every identity and theorem check on one MDP.

    Margins are worst-case absolute errors (or, for the monotonicity checks,
    the most negative per-sweep improvement, flipped in sign so that bigger
    is worse); a check passes when its margin stays within tolerance.
    """
    rng = np.random.default_rng(seed)
    policies = [TabularPolicy.uniform(mdp.n_states, mdp.n_goals, mdp.n_actions)]
    policies += [
        TabularPolicy.random(mdp.n_states, mdp.n_goals, mdp.n_actions, rng)
        for _ in range(max(0, n_policies - 1))
    ]

    results = []

    row_margin = float(np.max(np.abs(mdp.transitions.sum(axis=2) - 1.0)))
    results.append(CheckResult("transition_rows_sum_to_one", row_margin <= 1e-12,
                               row_margin, 1e-12))

    occ_margin = 0.0
    identity_margin = 0.0
    first_hit_margin = 0.0
    support_leak = 0.0
    hit_mass_margin = 0.0
    for policy in policies:
        for goal in range(mdp.n_goals):
            table = compute_occupancy(mdp, policy, goal)
            occ_margin = max(occ_margin, float(np.max(np.abs(table.d.sum(axis=2) - 1.0))))
            occ_margin = max(occ_margin, float(np.max(np.abs(table.d_marginal.sum(axis=1) - 1.0))))
            q_iter, _ = policy_evaluation_iterative(mdp, policy, goal)
            identity_margin = max(
                identity_margin, float(np.max(np.abs(q_from_occupancy(table) - q_iter)))
            )
            defined = table.hit_mass > HIT_MASS_FLOOR
            if np.any(defined):
                sums = table.first_hit[defined].sum(axis=1)
                first_hit_margin = max(first_hit_margin, float(np.max(np.abs(sums - 1.0))))
            outside = np.ones(mdp.n_states, dtype=bool)
            outside[mdp.goal_states(goal)] = False
            support_leak = max(support_leak, float(np.max(np.abs(table.first_hit[:, outside]))
                                                   if np.any(outside) else 0.0))
            hit_mass_margin = max(
                hit_mass_margin, float(np.max(np.abs(table.hit_mass - table.p_goal_marginal)))
            )
    results.append(CheckResult("occupancy_rows_sum_to_one", occ_margin <= 1e-9,
                               occ_margin, 1e-9))
    results.append(CheckResult("q_equals_p_over_one_minus_gamma", identity_margin <= 1e-9,
                               identity_margin, 1e-9,
                               "occupancy route vs iterative Bellman evaluation"))
    results.append(CheckResult("first_hit_rows_normalized", first_hit_margin <= 1e-9,
                               first_hit_margin, 1e-9))
    results.append(CheckResult("first_hit_support_in_goal_set", support_leak <= 0.0,
                               support_leak, 0.0))
    results.append(CheckResult("hit_mass_matches_goal_density", hit_mass_margin <= 1e-9,
                               hit_mass_margin, 1e-9))

    certs = [
        check_assumption_uniform_reachability(mdp, policies[0], g, delta)
        for g in range(mdp.n_goals)
    ]
    n_bad = sum(not c.holds for c in certs)
    results.append(CheckResult(
        "uniform_reachability_certificate", n_bad == 0, float(n_bad), 0.0,
        f"{len(certs) - n_bad}/{len(certs)} goals certified (delta={delta:g})",
    ))

    report = check_theorem2_monotonicity(mdp, n_iterations=pi_sweeps, delta=delta)
    via_margin = max(0.0, -report.min_via_diff)
    hit_margin = max(0.0, -report.min_hit_diff)
    down_margin = max(0.0, -report.min_downstream_diff)
    gated = "hypothesis certified" if report.assumption_holds else "hypothesis NOT certified"
    results.append(CheckResult("via_goal_value_monotone", via_margin <= 1e-9,
                               via_margin, 1e-9, gated))
    results.append(CheckResult("hit_probability_monotone", hit_margin <= 1e-9,
                               hit_margin, 1e-9, gated))
    results.append(CheckResult("downstream_value_monotone", down_margin <= 1e-9,
                               down_margin, 1e-9, gated))
    return results


def format_report(results):
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status}  {res.name:<36} margin={res.margin:.3e}  tol={res.tolerance:.0e}"
        if res.detail:
            line += f"  ({res.detail})"
        lines.append(line)
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)


def write_report_csv(results, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "passed", "margin", "tolerance", "detail"])
        for res in results:
            writer.writerow([res.name, int(res.passed), repr(res.margin),
                             repr(res.tolerance), res.detail])
