"""Exact matrix-form objectives: projected Bellman error, TD error, and gradients.

The measurement distribution factors as d(s, a) = d_s * pi_theta(a|s): the
state weights d_s are fixed at construction, while the action factor follows
the target policy at whatever theta is being evaluated. Every inverse is a
Moore-Penrose pseudo-inverse with singular values below 1e-10 * sigma_max
discarded, so the objectives stay well defined on rank-deficient bases.
"""

from __future__ import annotations

import numpy as np

from .exceptions import NumericalError
from .mdp import FeatureMap, TabularMdp, state_action_transition_matrix
from .policy import BoltzmannPolicy
from .validation import as_float_array, check_length


class ObjectiveWorkspace:
    """Caches the matrices needed to evaluate objectives for one problem.

    Attributes:
        mdp, feature_map, target_policy: the problem triple.
        state_weights: fixed per-state measurement weights d_s (uniform by
            default); the full diagonal at theta is d_s * pi_theta(a|s).
        Phi: stacked (n_states * n_actions, k) feature matrix.
        R: reward vector over state-action pairs, same row ordering as Phi.
    """

    def __init__(
        self,
        mdp: TabularMdp,
        feature_map: FeatureMap,
        target_policy: BoltzmannPolicy,
        state_weights=None,
        rcond: float = 1e-10,
    ):
        if feature_map.n_states != mdp.n_states or feature_map.n_actions != mdp.n_actions:
            raise ValueError("feature map shape does not match the MDP")
        if target_policy.feature_map is not feature_map:
            raise ValueError("target policy must evaluate the workspace feature map")
        self.mdp = mdp
        self.feature_map = feature_map
        self.target_policy = target_policy
        self.rcond = float(rcond)

        if state_weights is None:
            state_weights = np.full(mdp.n_states, 1.0 / mdp.n_states)
        state_weights = as_float_array(state_weights, "state_weights", ndim=1)
        check_length(state_weights, mdp.n_states, "state_weights")
        if np.any(state_weights < 0) or abs(state_weights.sum() - 1.0) > 1e-8:
            raise ValueError("state_weights must be a distribution over states")
        self.state_weights = state_weights

        self.Phi = feature_map.stacked()
        self.R = mdp.reward.ravel()
        # (n_states * n_actions, n_states) view of the transition tensor.
        self._t_flat = mdp.transition.reshape(self.Phi.shape[0], mdp.n_states)

    # -- per-theta building blocks -------------------------------------------------

    def state_action_weights(self, theta: np.ndarray) -> np.ndarray:
        """Diagonal of D at theta: d_s * pi_theta(a|s), flattened."""
        pi = self.target_policy.probabilities_all(theta)
        return (self.state_weights[:, None] * pi).ravel()

    def bellman_residual(self, theta: np.ndarray) -> np.ndarray:
        """R + gamma P_theta Phi theta - Phi theta over state-action pairs."""
        theta = self._check_theta(theta)
        next_values = self.target_policy.expected_features_all(theta) @ theta
        q = self.Phi @ theta
        return self.R + self.mdp.gamma * (self._t_flat @ next_values) - q

    def exact_w(self, theta: np.ndarray) -> np.ndarray:
        """Least-norm solution of (Phi^T D Phi) w = Phi^T D (T Q - Q)."""
        theta = self._check_theta(theta)
        d = self.state_action_weights(theta)
        g = self.Phi.T @ (d * self.bellman_residual(theta))
        m = self.Phi.T @ (d[:, None] * self.Phi)
        return np.linalg.pinv(m, rcond=self.rcond) @ g

    # -- objectives ----------------------------------------------------------------

    def mspbe(self, theta: np.ndarray) -> float:
        """Squared D-weighted norm of the projected Bellman residual (quadratic form)."""
        theta = self._check_theta(theta)
        d = self.state_action_weights(theta)
        g = self.Phi.T @ (d * self.bellman_residual(theta))
        m = self.Phi.T @ (d[:, None] * self.Phi)
        value = float(g @ (np.linalg.pinv(m, rcond=self.rcond) @ g))
        if value < -1e-12:
            raise NumericalError(f"projected Bellman error came out negative: {value:g}")
        return max(value, 0.0)

    def mspbe_projection_form(self, theta: np.ndarray) -> float:
        """The same objective through the explicit projection matrix.

        Builds Pi = Phi (Phi^T D Phi)^+ Phi^T D and evaluates
        ||Q - Pi T Q||_D^2 directly; an independent route used to cross-check
        the quadratic form.
        """
        theta = self._check_theta(theta)
        d = self.state_action_weights(theta)
        m = self.Phi.T @ (d[:, None] * self.Phi)
        projector = self.Phi @ np.linalg.pinv(m, rcond=self.rcond) @ (self.Phi.T * d[None, :])
        p = state_action_transition_matrix(self.mdp, self.target_policy, theta)
        q = self.Phi @ theta
        bellman_image = self.R + self.mdp.gamma * (p @ q)
        diff = q - projector @ bellman_image
        return float(diff @ (d * diff))

    def mstde(self, theta: np.ndarray) -> float:
        """Expected squared TD error under the measurement distribution."""
        theta = self._check_theta(theta)
        d = self.state_action_weights(theta)
        q = self.Phi @ theta
        next_values = self.target_policy.expected_features_all(theta) @ theta
        # delta[(s,a), s'] = r(s,a) + gamma v(s') - q(s,a)
        delta = self.R[:, None] + self.mdp.gamma * next_values[None, :] - q[:, None]
        return float(np.sum(d[:, None] * self._t_flat * delta**2))

    # -- gradients -----------------------------------------------------------------

    def mspbe_gradient(self, theta: np.ndarray) -> np.ndarray:
        """Analytic gradient of mspbe at theta.

        Differentiates all three theta dependencies: the residual, the
        pair-transition operator, and the D diagonal (through the policy
        factor only; the state weights are fixed). Per component i the three
        assembled terms are

            2 (Phi^T dD_i res)^T w
          + 2 (Phi^T D (gamma dP_i Phi theta + gamma P Phi_:i - Phi_:i))^T w
          -   w^T (Phi^T dD_i Phi) w

        with w the exact auxiliary fixed point.
        """
        theta = self._check_theta(theta)
        policy = self.target_policy
        pi = policy.probabilities_all(theta)
        d = (self.state_weights[:, None] * pi).ravel()
        ds_rep = np.repeat(self.state_weights, self.mdp.n_actions)

        res = self.bellman_residual(theta)
        m = self.Phi.T @ (d[:, None] * self.Phi)
        w = np.linalg.pinv(m, rcond=self.rcond) @ (self.Phi.T @ (d * res))
        q = self.Phi @ w

        grads = policy.gradients_all(theta)
        expected_features = policy.expected_features_all(theta)
        expected_grad_values = policy.expected_grad_values_all(theta)
        # Column i of V is gamma dP_i Phi theta + gamma P Phi_:i - Phi_:i.
        v = self.mdp.gamma * self._t_flat @ (expected_grad_values + expected_features) - self.Phi

        return (
            2.0 * grads.T @ (ds_rep * res * q)
            + 2.0 * v.T @ (d * q)
            - grads.T @ (ds_rep * q * q)
        )

    def finite_difference_gradient(self, theta: np.ndarray, h: float = 1e-5) -> np.ndarray:
        """Central differences of mspbe, component by component.

        Each probe re-evaluates the policy-dependent quantities (D and the
        transition operator) at the perturbed theta while the state weights
        stay fixed, mirroring the dependency structure the analytic gradient
        differentiates.
        """
        theta = self._check_theta(theta)
        if not h > 0:
            raise ValueError("h must be positive")
        grad = np.zeros_like(theta)
        probe = theta.copy()
        for i in range(theta.size):
            probe[i] = theta[i] + h
            up = self.mspbe(probe)
            probe[i] = theta[i] - h
            down = self.mspbe(probe)
            probe[i] = theta[i]
            grad[i] = (up - down) / (2.0 * h)
        return grad

    def _check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        check_length(theta, self.feature_map.k, "theta")
        return theta
