import numpy as np
import pytest

from pgq import BoltzmannPolicy, FeatureMap, TabularMdp, onehot_features
from pgq.objectives import ObjectiveWorkspace


def quadruple_loop_residual(workspace, theta):
    """Brute-force T Q - Q over (s, a, s', a')."""
    mdp, policy = workspace.mdp, workspace.target_policy
    phi = workspace.feature_map.phi
    out = np.zeros(mdp.n_states * mdp.n_actions)
    for s in range(mdp.n_states):
        for a in range(mdp.n_actions):
            backup = 0.0
            for s2 in range(mdp.n_states):
                pi = policy.action_probabilities(theta, s2)
                for a2 in range(mdp.n_actions):
                    backup += mdp.transition[s, a, s2] * pi[a2] * (theta @ phi[s2, a2])
            out[s * mdp.n_actions + a] = (
                mdp.reward[s, a] + mdp.gamma * backup - theta @ phi[s, a]
            )
    return out


def triple_loop_mstde(workspace, theta):
    """Brute-force expected squared TD error over (s, a, s')."""
    mdp, policy = workspace.mdp, workspace.target_policy
    phi = workspace.feature_map.phi
    total = 0.0
    pi_all = policy.probabilities_all(theta)
    for s in range(mdp.n_states):
        for a in range(mdp.n_actions):
            weight = workspace.state_weights[s] * pi_all[s, a]
            for s2 in range(mdp.n_states):
                delta = (
                    mdp.reward[s, a]
                    + mdp.gamma * (theta @ policy.expected_next_feature(theta, s2))
                    - theta @ phi[s, a]
                )
                total += weight * mdp.transition[s, a, s2] * delta**2
    return total


def fixed_point_workspace():
    """1-state, 1-action chain where theta = (2,) solves the Bellman equation."""
    mdp = TabularMdp(np.ones((1, 1, 1)), np.ones((1, 1)), gamma=0.5)
    features = FeatureMap(np.ones((1, 1, 1)))
    policy = BoltzmannPolicy(features, tau=1.0)
    return ObjectiveWorkspace(mdp, features, policy)


class TestBellmanResidual:
    def test_zero_at_zero_theta_on_baird(self, baird):
        mdp, features, _ = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        np.testing.assert_allclose(ws.bellman_residual(np.zeros(16)), 0.0, atol=1e-15)

    def test_vanishing_gamma_collapses_to_reward_minus_values(self, toy):
        # gamma must stay inside (0, 1); 1e-300 makes the backup term vanish
        # below float resolution, so the residual equals R - Phi theta exactly.
        mdp, features, policy, _ = toy
        tiny = TabularMdp(mdp.transition, mdp.reward, gamma=1e-300)
        ws = ObjectiveWorkspace(tiny, features, policy)
        theta = np.arange(6, dtype=float)
        np.testing.assert_allclose(
            ws.bellman_residual(theta), ws.R - ws.Phi @ theta, atol=1e-12
        )

    def test_matches_quadruple_loop_on_baird_init(self, baird):
        mdp, features, theta_init = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        np.testing.assert_allclose(
            ws.bellman_residual(theta_init), quadruple_loop_residual(ws, theta_init), atol=1e-12
        )


class TestMspbe:
    def test_zero_at_zero_theta_on_baird(self, baird):
        mdp, features, _ = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        assert ws.mspbe(np.zeros(16)) == 0.0

    def test_zero_at_exact_fixed_point(self):
        ws = fixed_point_workspace()
        assert ws.mspbe(np.array([2.0])) == pytest.approx(0.0, abs=1e-15)
        assert ws.bellman_residual(np.array([2.0]))[0] == 0.0

    def test_quadratic_and_projection_forms_agree_at_baird_init(self, baird):
        mdp, features, theta_init = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        quad = ws.mspbe(theta_init)
        proj = ws.mspbe_projection_form(theta_init)
        assert abs(quad - proj) / proj < 1e-10

    def test_nonnegative_on_random_theta(self, baird, toy):
        mdp, features, _ = baird
        ws_baird = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        _, _, _, ws_toy = toy
        rng = np.random.default_rng(2)
        for _ in range(20):
            assert ws_baird.mspbe(rng.normal(size=16)) >= 0.0
            assert ws_toy.mspbe(rng.normal(size=6)) >= 0.0


class TestExactW:
    def test_zero_at_zero_theta_on_baird(self, baird):
        mdp, features, _ = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        np.testing.assert_allclose(ws.exact_w(np.zeros(16)), 0.0, atol=1e-15)

    def test_matches_enumeration_on_full_rank_toy(self, toy):
        mdp, features, policy, ws = toy
        rng = np.random.default_rng(17)
        phi = features.phi
        for _ in range(5):
            theta = rng.normal(size=6)
            pi = policy.probabilities_all(theta)
            cov = np.zeros((6, 6))
            mean_delta_phi = np.zeros(6)
            for s in range(3):
                for a in range(2):
                    weight = ws.state_weights[s] * pi[s, a]
                    cov += weight * np.outer(phi[s, a], phi[s, a])
                    delta = mdp.reward[s, a] - theta @ phi[s, a]
                    for s2 in range(3):
                        delta += (
                            mdp.gamma
                            * mdp.transition[s, a, s2]
                            * (theta @ policy.expected_next_feature(theta, s2))
                        )
                    mean_delta_phi += weight * delta * phi[s, a]
            reference = np.linalg.solve(cov, mean_delta_phi)
            np.testing.assert_allclose(ws.exact_w(theta), reference, atol=1e-10)

    def test_quadratic_form_identity(self, baird):
        # mspbe equals (Phi^T D residual) . exact_w by construction of w.
        mdp, features, theta_init = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        d = ws.state_action_weights(theta_init)
        g = ws.Phi.T @ (d * ws.bellman_residual(theta_init))
        assert abs(ws.mspbe(theta_init) - g @ ws.exact_w(theta_init)) < 1e-10 * ws.mspbe(theta_init)

    def test_w_update_fixed_point_in_expectation(self, baird, toy):
        # E[(delta - phi . w) phi] = 0 at w = exact_w, by enumeration.
        _, _, _, ws_toy = toy
        mdp, features, theta_init = baird
        ws_baird = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        for ws, theta in ((ws_toy, np.arange(6) / 3.0), (ws_baird, theta_init)):
            w = ws.exact_w(theta)
            d = ws.state_action_weights(theta)
            expected_update = ws.Phi.T @ (d * (ws.bellman_residual(theta) - ws.Phi @ w))
            np.testing.assert_allclose(expected_update, 0.0, atol=1e-10)


class TestMspbeGradient:
    def test_zero_at_zero_theta_on_baird(self, baird):
        mdp, features, _ = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        np.testing.assert_allclose(ws.mspbe_gradient(np.zeros(16)), 0.0, atol=1e-15)

    def test_matches_finite_differences_on_toy(self, toy):
        _, _, _, ws = toy
        rng = np.random.default_rng(23)
        for _ in range(5):
            theta = rng.normal(size=6)
            analytic = ws.mspbe_gradient(theta)
            numeric = ws.finite_difference_gradient(theta, h=1e-5)
            scale = max(np.max(np.abs(numeric)), 1e-12)
            assert np.max(np.abs(analytic - numeric)) / scale < 5e-5

    def test_descent_direction_at_baird_init(self, baird):
        mdp, features, theta_init = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        grad = ws.mspbe_gradient(theta_init)
        assert ws.mspbe(theta_init - 1e-6 * grad) < ws.mspbe(theta_init)


class TestMstde:
    def test_zero_at_zero_theta_on_baird(self, baird):
        mdp, features, _ = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        assert ws.mstde(np.zeros(16)) == 0.0

    def test_zero_at_exact_fixed_point(self):
        ws = fixed_point_workspace()
        assert ws.mstde(np.array([2.0])) == pytest.approx(0.0, abs=1e-15)

    def test_matches_triple_loop_on_baird_init(self, baird):
        mdp, features, theta_init = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.8))
        assert ws.mstde(theta_init) == pytest.approx(triple_loop_mstde(ws, theta_init), abs=1e-12)


class TestFiniteDifferenceGradient:
    def test_quadratic_hook_single_action(self):
        # With one action the policy factor is constant (D, P fixed), rewards
        # are zero, and the objective is the pure quadratic theta^T A theta
        # with gradient 2 A theta; A is assembled here from explicit matrices.
        rng = np.random.default_rng(31)
        n = 3
        transition = rng.uniform(0.1, 1.0, size=(n, 1, n))
        transition /= transition.sum(axis=2, keepdims=True)
        mdp = TabularMdp(transition, np.zeros((n, 1)), gamma=0.9)
        features = onehot_features(n, 1)  # orthonormal basis
        policy = BoltzmannPolicy(features, tau=1.0)
        weights = np.array([0.5, 0.3, 0.2])
        ws = ObjectiveWorkspace(mdp, features, policy, state_weights=weights)

        d = np.diag(weights)
        p = transition[:, 0, :]
        c = d @ (mdp.gamma * p - np.eye(n))
        a_matrix = c.T @ np.linalg.inv(d) @ c
        for _ in range(5):
            theta = rng.normal(size=n)
            assert ws.mspbe(theta) == pytest.approx(theta @ a_matrix @ theta, rel=1e-10)
            numeric = ws.finite_difference_gradient(theta, h=1e-5)
            np.testing.assert_allclose(numeric, 2.0 * a_matrix @ theta, atol=1e-8)

    def test_zero_at_zero_theta_on_baird(self, baird):
        mdp, features, _ = baird
        ws = ObjectiveWorkspace(mdp, features, BoltzmannPolicy(features, tau=0.4))
        np.testing.assert_allclose(ws.finite_difference_gradient(np.zeros(16), h=1e-5), 0.0, atol=1e-8)

    def test_step_size_sweep_is_flat_or_u_shaped(self, toy):
        _, _, _, ws = toy
        theta = np.random.default_rng(37).normal(size=6)
        analytic = ws.mspbe_gradient(theta)
        scale = max(np.max(np.abs(analytic)), 1e-12)
        errors = {
            h: np.max(np.abs(ws.finite_difference_gradient(theta, h) - analytic)) / scale
            for h in (1e-4, 1e-5, 1e-6)
        }
        assert errors[1e-5] < 5e-5
        assert errors[1e-5] <= 2.0 * max(errors[1e-4], errors[1e-6])

    def test_rejects_nonpositive_h(self, toy):
        _, _, _, ws = toy
        with pytest.raises(ValueError, match="h"):
            ws.finite_difference_gradient(np.zeros(6), h=0.0)


class TestWorkspaceValidation:
    def test_state_weights_must_be_distribution(self, toy):
        mdp, features, policy, _ = toy
        with pytest.raises(ValueError, match="state_weights"):
            ObjectiveWorkspace(mdp, features, policy, state_weights=(0.5, 0.5, 0.5))

    def test_policy_feature_map_must_match(self, toy, baird):
        mdp, features, _, _ = toy
        _, baird_features, _ = baird
        foreign = BoltzmannPolicy(baird_features, tau=0.4)
        with pytest.raises(ValueError):
            ObjectiveWorkspace(mdp, features, foreign)
