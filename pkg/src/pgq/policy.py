"""Boltzmann (softmax) policies over linear action values, with exact gradients."""

from __future__ import annotations

import numpy as np

from .exceptions import NumericalError
from .mdp import FeatureMap
from .validation import check_index, check_length, check_positive

# Behavior probabilities below this are useless as importance-ratio denominators.
MIN_BEHAVIOR_PROB = 1e-300


class BoltzmannPolicy:
    """Action probabilities proportional to exp(theta . phi(s, a) / tau).

    The temperature tau controls concentration: large tau approaches the
    uniform policy, small tau approaches the greedy one. The parameter vector
    theta is passed to every call, so one policy object can serve a live,
    changing theta (target and behavior policies differing only in tau share
    the same theta).
    """

    def __init__(self, feature_map: FeatureMap, tau: float = 1.0):
        if not isinstance(feature_map, FeatureMap):
            raise TypeError("feature_map must be a FeatureMap")
        self.feature_map = feature_map
        self.tau = check_positive(tau, "tau")

    def get_params(self, deep: bool = True) -> dict:
        return {"feature_map": self.feature_map, "tau": self.tau}

    def _logits(self, theta: np.ndarray, s: int) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        check_length(theta, self.feature_map.k, "theta")
        with np.errstate(over="ignore", invalid="ignore"):
            logits = self.feature_map.phi[s] @ theta / self.tau
        if not np.all(np.isfinite(logits)):
            raise NumericalError(f"non-finite action values at state {s}")
        return logits

    def action_probabilities(self, theta: np.ndarray, s: int) -> np.ndarray:
        """Softmax over the action values of state s, overflow-safe."""
        s = check_index(s, self.feature_map.n_states, "state")
        logits = self._logits(theta, s)
        z = np.exp(logits - logits.max())
        return z / z.sum()

    def probabilities_all(self, theta: np.ndarray) -> np.ndarray:
        """(n_states, n_actions) matrix of action probabilities."""
        theta = np.asarray(theta, dtype=float)
        check_length(theta, self.feature_map.k, "theta")
        with np.errstate(over="ignore", invalid="ignore"):
            logits = self.feature_map.phi @ theta / self.tau
        if not np.all(np.isfinite(logits)):
            raise NumericalError("non-finite action values")
        z = np.exp(logits - logits.max(axis=1, keepdims=True))
        return z / z.sum(axis=1, keepdims=True)

    def score(self, theta: np.ndarray, s: int, a: int) -> np.ndarray:
        """Gradient of log pi(a|s): (phi(s,a) - sum_b pi(b|s) phi(s,b)) / tau."""
        a = check_index(a, self.feature_map.n_actions, "action")
        pi = self.action_probabilities(theta, s)
        mean_feature = pi @ self.feature_map.phi[s]
        return (self.feature_map.phi[s, a] - mean_feature) / self.tau

    def gradient(self, theta: np.ndarray, s: int, a: int) -> np.ndarray:
        """Gradient of pi(a|s) with respect to theta."""
        pi = self.action_probabilities(theta, s)
        mean_feature = pi @ self.feature_map.phi[s]
        return pi[a] * (self.feature_map.phi[s, a] - mean_feature) / self.tau

    def gradients_all(self, theta: np.ndarray) -> np.ndarray:
        """All policy gradients, stacked (n_states * n_actions, k)."""
        fm = self.feature_map
        pi = self.probabilities_all(theta)
        mean_features = np.einsum("sa,sak->sk", pi, fm.phi)
        g = pi[:, :, None] * (fm.phi - mean_features[:, None, :]) / self.tau
        return g.reshape(fm.n_states * fm.n_actions, fm.k)

    def expected_next_feature(self, theta: np.ndarray, s_next: int) -> np.ndarray:
        """phi-bar: sum_a' pi(a'|s') phi(s', a')."""
        pi = self.action_probabilities(theta, s_next)
        return pi @ self.feature_map.phi[s_next]

    def expected_features_all(self, theta: np.ndarray) -> np.ndarray:
        pi = self.probabilities_all(theta)
        return np.einsum("sa,sak->sk", pi, self.feature_map.phi)

    def expected_next_grad_value(self, theta: np.ndarray, s_next: int) -> np.ndarray:
        """phi-bar-grad: sum_a' grad pi(a'|s') (theta . phi(s', a'))."""
        s_next = check_index(s_next, self.feature_map.n_states, "state")
        pi = self.action_probabilities(theta, s_next)
        phi_s = self.feature_map.phi[s_next]
        values = phi_s @ np.asarray(theta, dtype=float)
        mean_feature = pi @ phi_s
        grads = pi[:, None] * (phi_s - mean_feature[None, :]) / self.tau
        return values @ grads

    def expected_grad_values_all(self, theta: np.ndarray) -> np.ndarray:
        fm = self.feature_map
        pi = self.probabilities_all(theta)
        values = fm.phi @ np.asarray(theta, dtype=float)
        mean_features = np.einsum("sa,sak->sk", pi, fm.phi)
        grads = pi[:, :, None] * (fm.phi - mean_features[:, None, :]) / self.tau
        return np.einsum("sak,sa->sk", grads, values)

    def sample_action(self, theta: np.ndarray, s: int, rng: np.random.Generator) -> int:
        return int(rng.choice(self.feature_map.n_actions, p=self.action_probabilities(theta, s)))


def importance_ratios(
    target: BoltzmannPolicy,
    behavior: BoltzmannPolicy,
    theta: np.ndarray,
    s: int,
    a: int,
) -> tuple[float, np.ndarray]:
    """Return (rho, rho_grad) = (pi(a|s), grad pi(a|s)) / b(a|s)."""
    b = float(behavior.action_probabilities(theta, s)[a])
    if b < MIN_BEHAVIOR_PROB:
        raise NumericalError(
            f"behavior probability {b:g} for action {a} at state {s} is unusably small"
        )
    rho = float(target.action_probabilities(theta, s)[a]) / b
    rho_grad = target.gradient(theta, s, a) / b
    return rho, rho_grad
