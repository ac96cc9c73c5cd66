from pathlib import Path

import numpy as np
import pytest

from gchr.envs import (
    BlockPush2D,
    LMaze2D,
    PointReach2D,
    TabularGCMDP,
    goal_region_contains,
    load_tabular_mdp,
    make_env,
    save_tabular_mdp,
    sparse_reward,
    tabular_rollout,
)
from gchr.envs.block_push import CONTACT_DIST
from gchr.envs.l_maze import in_free_space

ASSETS = Path(__file__).resolve().parent.parent / "assets"


def test_point_reach_reset_distributions():
    env = PointReach2D()
    rng = np.random.default_rng(0)
    starts = [env.reset(rng) for _ in range(200)]
    positions = np.array([s.state[:2] for s in starts])
    goals = np.array([s.desired_goal for s in starts])
    assert np.all(np.abs(positions) <= 0.05)
    assert np.all([s.state[2:].tolist() == [0.0, 0.0] for s in starts])
    assert np.all(np.abs(goals) <= 1.0)
    assert goals.min() < -0.5 and goals.max() > 0.5  # actually spreads over the box
    assert all(s.step_index == 0 for s in starts)


def test_l_maze_reset_start_bottom_left_goal_top_right():
    env = LMaze2D()
    rng = np.random.default_rng(1)
    for _ in range(100):
        es = env.reset(rng)
        assert in_free_space(es.state[:2])
        assert es.state[0] < 0.3 and es.state[1] < 0.3
        assert goal_region_contains(es.desired_goal)
        assert es.desired_goal[0] > 0.6 and es.desired_goal[1] > 0.6


def test_fixed_seed_gives_identical_reset():
    for name in ("point_reach", "l_maze", "block_push"):
        a = make_env(name).reset(np.random.default_rng(7))
        b = make_env(name).reset(np.random.default_rng(7))
        np.testing.assert_array_equal(a.state, b.state)
        np.testing.assert_array_equal(a.desired_goal, b.desired_goal)


def test_reward_when_already_within_tolerance():
    env = PointReach2D()
    rng = np.random.default_rng(2)
    es = env.reset(rng)
    es.desired_goal = es.achieved_goal + 0.01  # within eps = 0.05
    _, reward, _ = env.step(es, np.zeros(2), rng)
    assert reward == 1.0


def test_neg_one_zero_convention():
    env = PointReach2D(reward_convention="neg_one_zero")
    rng = np.random.default_rng(2)
    es = env.reset(rng)
    es.desired_goal = np.array([0.9, 0.9])
    _, reward, _ = env.step(es, np.zeros(2), rng)
    assert reward == -1.0


def test_zero_action_zero_velocity_is_fixed_point():
    env = PointReach2D()
    rng = np.random.default_rng(3)
    es = env.reset(rng)
    nxt, _, _ = env.step(es, np.zeros(2), rng)
    np.testing.assert_array_equal(nxt.state[:2], es.state[:2])
    np.testing.assert_array_equal(nxt.state[2:], np.zeros(2))


def test_phi_projections():
    pr = PointReach2D()
    np.testing.assert_array_equal(pr.phi(np.array([1.0, 2.0, 3.0, 4.0])), [1.0, 2.0])
    bp = BlockPush2D()
    np.testing.assert_array_equal(bp.phi(np.array([1.0, 2.0, 3.0, 4.0])), [3.0, 4.0])


def test_achieved_goal_always_recomputed_from_state():
    env = LMaze2D()
    rng = np.random.default_rng(4)
    es = env.reset(rng)
    for _ in range(20):
        es, _, _ = env.step(es, rng.uniform(-1, 1, 2), rng)
        np.testing.assert_array_equal(es.achieved_goal, env.phi(es.state))


def test_episode_length_exactly_horizon():
    env = PointReach2D(horizon=13)
    rng = np.random.default_rng(5)
    es = env.reset(rng)
    dones = []
    for _ in range(13):
        es, _, done = env.step(es, np.zeros(2), rng)
        dones.append(done)
    assert dones == [False] * 12 + [True]
    with pytest.raises(RuntimeError, match="done"):
        env.step(es, np.zeros(2), rng)


def test_out_of_box_action_rejected():
    env = PointReach2D()
    es = env.reset(np.random.default_rng(0))
    with pytest.raises(ValueError, match="-1, 1"):
        env.step(es, np.array([1.5, 0.0]), np.random.default_rng(0))


def test_noise_free_episode_is_bit_reproducible():
    def run(seed):
        env = LMaze2D()
        rng = np.random.default_rng(seed)
        es = env.reset(rng)
        states = [es.state]
        arng = np.random.default_rng(seed + 1)
        for _ in range(env.spec.horizon):
            es, _, _ = env.step(es, arng.uniform(-1, 1, 2), rng)
            states.append(es.state)
        return np.array(states)

    np.testing.assert_array_equal(run(11), run(11))


def test_action_noise_perturbs_dynamics():
    env = PointReach2D(action_noise_std=0.3)
    rng = np.random.default_rng(6)
    es = env.reset(rng)
    nxt, _, _ = env.step(es, np.zeros(2), rng)
    assert np.any(nxt.state[2:] != 0.0)


def test_block_push_contact_resolution_hand_case():
    # agent at origin commanded (1, 0): moves to (0.1, 0); block at (0.2, 0)
    # overlaps by 0.06, so it is pushed to agent + contact distance along +x
    env = BlockPush2D()
    state = np.array([0.0, 0.0, 0.2, 0.0])
    nxt = env._dynamics(state, np.array([1.0, 0.0]))
    np.testing.assert_allclose(nxt[:2], [0.1, 0.0])
    np.testing.assert_allclose(nxt[2:], [0.1 + CONTACT_DIST, 0.0], atol=1e-12)


def test_block_push_diagonal_contact_hand_case():
    env = BlockPush2D()
    state = np.array([0.0, 0.0, 0.1, 0.1])
    nxt = env._dynamics(state, np.array([0.5, 0.5]))
    agent = np.array([0.05, 0.05])
    np.testing.assert_allclose(nxt[:2], agent)
    # scalar oracle: offset (0.05, 0.05), |offset| = 0.05*sqrt(2) < 0.16,
    # unit normal (1/sqrt 2, 1/sqrt 2), block lands at agent + 0.16 * normal
    root_half = 1.0 / np.sqrt(2.0)
    expected = agent + CONTACT_DIST * np.array([root_half, root_half])
    np.testing.assert_allclose(nxt[2:], expected, atol=1e-12)


def test_block_push_no_contact_leaves_block():
    env = BlockPush2D()
    state = np.array([-0.5, 0.0, 0.5, 0.0])
    nxt = env._dynamics(state, np.array([1.0, 0.0]))
    np.testing.assert_array_equal(nxt[2:], [0.5, 0.0])


def test_l_maze_wall_slide_zeroes_blocked_velocity():
    env = LMaze2D()
    state = np.array([0.3, 0.38, 0.0, 1.0])
    nxt = env._dynamics(state, np.array([1.0, 1.0]))
    # vertical motion hits the bottom-strip ceiling; horizontal slide survives
    assert nxt[1] == pytest.approx(0.38)
    assert nxt[0] > 0.3
    assert nxt[3] == 0.0 and nxt[2] > 0.0
    assert in_free_space(nxt[:2])


def test_l_maze_never_leaves_free_space():
    env = LMaze2D()
    rng = np.random.default_rng(8)
    es = env.reset(rng)
    for _ in range(env.spec.horizon):
        es, _, _ = env.step(es, rng.uniform(-1, 1, 2), rng)
        assert in_free_space(es.state[:2])


def test_reward_is_pure_function_of_goal_distance():
    env = PointReach2D()
    rng = np.random.default_rng(9)
    es = env.reset(rng)
    for _ in range(10):
        es, reward, _ = env.step(es, rng.uniform(-1, 1, 2), rng)
        recomputed = sparse_reward(
            es.achieved_goal, es.desired_goal, env.spec.success_tolerance,
            env.spec.reward_convention,
        )
        assert reward == recomputed


# --- tabular family ---------------------------------------------------------


def chain3():
    return load_tabular_mdp(ASSETS / "chain3.mdp")


def test_chain_fixture_documented_rows():
    mdp = chain3()
    assert mdp.n_states == 3 and mdp.n_actions == 2
    assert mdp.gamma == 0.5
    np.testing.assert_array_equal(mdp.phi, [0, 1, 2])
    for a in range(2):
        np.testing.assert_array_equal(mdp.transitions[0, a], [0.0, 1.0, 0.0])
        np.testing.assert_array_equal(mdp.transitions[1, a], [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(mdp.transitions[2, a], [0.0, 0.0, 1.0])


def test_absorbing_state_self_transition():
    mdp = chain3()
    row = mdp.step_distribution(2, 0, goal=2)
    np.testing.assert_array_equal(row, [0.0, 0.0, 1.0])
    # same state under a different evaluated goal returns the raw row
    row = mdp.step_distribution(1, 0, goal=2)
    np.testing.assert_array_equal(row, mdp.transitions[1, 0])


def test_absorbing_override_is_one_hot_even_for_non_self_loops():
    transitions = np.zeros((2, 1, 2))
    transitions[0, 0] = [0.0, 1.0]
    transitions[1, 0] = [1.0, 0.0]  # raw row leaves state 1
    mdp = TabularGCMDP(transitions, phi=np.array([0, 1]), gamma=0.9)
    np.testing.assert_array_equal(mdp.step_distribution(1, 0, goal=1), [0.0, 1.0])


def test_step_distribution_index_errors():
    mdp = chain3()
    with pytest.raises(IndexError):
        mdp.step_distribution(5, 0, goal=0)
    with pytest.raises(IndexError):
        mdp.step_distribution(0, 3, goal=0)


def test_transition_rows_are_probability_vectors():
    rng = np.random.default_rng(10)
    for _ in range(10):
        n_s, n_a = 6, 3
        transitions = rng.dirichlet(np.ones(n_s), size=(n_s, n_a))
        mdp = TabularGCMDP(transitions, phi=rng.integers(0, 3, n_s), gamma=0.9)
        sums = mdp.transitions.sum(axis=2)
        assert np.all(np.abs(sums - 1.0) <= 1e-12)
        assert np.all(mdp.transitions >= 0)


def test_invalid_rows_rejected():
    bad = np.zeros((2, 1, 2))
    bad[0, 0] = [0.5, 0.6]
    bad[1, 0] = [1.0, 0.0]
    with pytest.raises(ValueError, match="sums"):
        TabularGCMDP(bad, phi=np.array([0, 1]), gamma=0.9)


def test_phi_consistency_with_goal_sets():
    mdp = chain3()
    for s in range(mdp.n_states):
        assert s in mdp.goal_states(mdp.phi[s])


def test_save_load_round_trip(tmp_path):
    mdp = chain3()
    path = tmp_path / "copy.mdp"
    save_tabular_mdp(path, mdp, header_comment="round trip")
    loaded = load_tabular_mdp(path)
    np.testing.assert_array_equal(loaded.transitions, mdp.transitions)
    np.testing.assert_array_equal(loaded.phi, mdp.phi)
    assert loaded.gamma == mdp.gamma


def test_loader_rejects_missing_rows(tmp_path):
    path = tmp_path / "broken.mdp"
    path.write_text("n_states 2\nn_actions 1\ngamma 0.5\nphi 0 1\nP 0 0 0.5 0.5\n")
    with pytest.raises(ValueError, match="missing P row"):
        load_tabular_mdp(path)


def test_tabular_rollout_follows_dynamics():
    mdp = chain3()
    probs = np.full((3, 2), 0.5)
    states, actions = tabular_rollout(mdp, probs, start_state=0, horizon=4, rng=np.random.default_rng(0))
    np.testing.assert_array_equal(states, [0, 1, 2, 2, 2])
    assert actions.shape == (4,)
