"""Incremental O(k)-per-step learners: Q-learning, GQ, and the two PGQ variants.

Learners follow the estimator idiom: hyperparameters are constructor
arguments mirrored by attributes (``get_params``/``set_params``), learned
state lives in trailing-underscore attributes, and ``partial_fit`` consumes
one transition sample at a time.
"""

from __future__ import annotations

import inspect
from typing import NamedTuple

import numpy as np

from .policy import BoltzmannPolicy, importance_ratios

# Any theta entry beyond this magnitude marks the run as diverged.
THETA_LIMIT = 1e100


class TransitionSample(NamedTuple):
    """One observed transition (s, a, r, s_next)."""

    s: int
    a: int
    r: float
    s_next: int


def td_error(theta: np.ndarray, sample: TransitionSample, policy: BoltzmannPolicy, gamma: float) -> float:
    """delta = r + gamma theta . phi_bar(s') - theta . phi(s, a)."""
    phi = policy.feature_map.vector(sample.s, sample.a)
    phi_bar = policy.expected_next_feature(theta, sample.s_next)
    return float(sample.r + gamma * (theta @ phi_bar) - theta @ phi)


def w_update(
    w: np.ndarray,
    theta: np.ndarray,
    sample: TransitionSample,
    policy: BoltzmannPolicy,
    gamma: float,
    beta: float,
) -> np.ndarray:
    """One auxiliary-weight step w + beta (delta - phi . w) phi, theta held fixed."""
    phi = policy.feature_map.vector(sample.s, sample.a)
    delta = td_error(theta, sample, policy, gamma)
    return w + beta * (delta - phi @ w) * phi


class BaseLearner:
    """Shared plumbing: parameter introspection, state, divergence guard."""

    def get_params(self, deep: bool = True) -> dict:
        out = {}
        for name in self._param_names():
            value = getattr(self, name)
            if deep and hasattr(value, "get_params"):
                for sub_name, sub_value in value.get_params().items():
                    out[f"{name}__{sub_name}"] = sub_value
            out[name] = value
        return out

    def set_params(self, **params):
        valid = self._param_names()
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    @classmethod
    def _param_names(cls) -> list[str]:
        signature = inspect.signature(cls.__init__)
        return [p.name for p in signature.parameters.values() if p.name != "self"]

    def reset(self, theta: np.ndarray, w: np.ndarray | None = None):
        """Initialize the learned state; returns self."""
        k = self.policy.feature_map.k
        theta = np.array(theta, dtype=float)
        if theta.shape != (k,):
            raise ValueError(f"theta must have shape ({k},), got {theta.shape}")
        self.theta_ = theta
        self.w_ = np.zeros(k) if w is None else np.array(w, dtype=float)
        self.diverged_ = False
        return self

    def partial_fit(self, sample: TransitionSample):
        """Apply one update; a diverged learner ignores further samples."""
        if self.diverged_:
            return self
        d_theta, d_w = self._increments(sample)
        theta = self.theta_ + d_theta
        w = self.w_ + d_w
        if not self._finite(theta) or not self._finite(w):
            self.diverged_ = True
            return self
        self.theta_ = theta
        self.w_ = w
        return self

    def action_values(self, s: int) -> np.ndarray:
        """Current value estimates theta . phi(s, a) for every action of s."""
        return self.policy.feature_map.phi[s] @ self.theta_

    @staticmethod
    def _finite(v: np.ndarray) -> bool:
        return bool(np.all(np.isfinite(v)) and np.max(np.abs(v)) <= THETA_LIMIT)

    def _increments(self, sample: TransitionSample) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError


class QLearning(BaseLearner):
    """Semi-gradient Q-learning with the expected-softmax backup.

    theta <- theta + alpha delta phi; no auxiliary weights, no correction
    terms, and therefore no off-policy stability guarantee.
    """

    def __init__(self, policy: BoltzmannPolicy, gamma: float, alpha: float = 0.01):
        self.policy = policy
        self.gamma = gamma
        self.alpha = alpha

    def _increments(self, sample):
        phi = self.policy.feature_map.vector(sample.s, sample.a)
        delta = td_error(self.theta_, sample, self.policy, self.gamma)
        return self.alpha * delta * phi, np.zeros_like(self.w_)


class GQ(BaseLearner):
    """Gradient TD control baseline (TDC-style two-timescale update).

    theta <- theta + alpha (delta phi - gamma phi_bar (phi . w))
    w     <- w + beta (delta - phi . w) phi
    """

    def __init__(self, policy: BoltzmannPolicy, gamma: float, alpha: float = 0.01, beta: float = 0.25):
        self.policy = policy
        self.gamma = gamma
        self.alpha = alpha
        self.beta = beta

    def _increments(self, sample):
        phi = self.policy.feature_map.vector(sample.s, sample.a)
        phi_bar = self.policy.expected_next_feature(self.theta_, sample.s_next)
        delta = td_error(self.theta_, sample, self.policy, self.gamma)
        pw = float(phi @ self.w_)
        d_theta = self.alpha * (delta * phi - self.gamma * pw * phi_bar)
        d_w = self.beta * (delta - pw) * phi
        return d_theta, d_w


class _PGQBase(BaseLearner):
    def __init__(
        self,
        policy: BoltzmannPolicy,
        gamma: float,
        alpha: float = 0.01,
        beta: float = 0.25,
        behavior_policy: BoltzmannPolicy | None = None,
    ):
        self.policy = policy
        self.gamma = gamma
        self.alpha = alpha
        self.beta = beta
        self.behavior_policy = behavior_policy

    @property
    def _behavior(self) -> BoltzmannPolicy:
        return self.behavior_policy if self.behavior_policy is not None else self.policy

    def _increments(self, sample):
        theta, w = self.theta_, self.w_
        policy = self.policy
        phi = policy.feature_map.vector(sample.s, sample.a)
        phi_bar = policy.expected_next_feature(theta, sample.s_next)
        grad_bar = policy.expected_next_grad_value(theta, sample.s_next)
        delta = td_error(theta, sample, policy, self.gamma)
        pw = float(phi @ w)

        score = policy.score(theta, sample.s, sample.a)
        delta_direction = self._delta_correction_direction(theta, sample, score)

        d_theta = self.alpha * (
            delta * phi
            - self.gamma * pw * phi_bar
            - delta * pw * delta_direction
            - self.gamma * pw * grad_bar
            + 0.5 * pw * pw * score
        )
        d_w = self.beta * (delta - pw) * phi
        return d_theta, d_w

    def _delta_correction_direction(self, theta, sample, score):
        raise NotImplementedError


class PGQ(_PGQBase):
    """Policy-gradient corrected Q-learning, per-sample form.

    Extends GQ with correction terms along the policy gradient so the update
    keeps following the projected-Bellman objective while the target policy
    (and with it the sampling distribution) drifts with theta:

    theta <- theta + alpha (delta phi - gamma phi_bar (phi . w)
                            - rho_grad delta (phi . w)
                            - gamma grad_bar (phi . w)
                            + 1/2 (grad pi / pi) (w . phi)^2)
    w     <- w + beta (delta - phi . w) phi

    The delta correction is scaled by the behavior probability
    (rho_grad = grad pi(a|s) / b(a|s)). The plain ratio rho = pi/b is computed
    and exposed as ``last_rho_`` for logging but enters no update term.
    """

    def _delta_correction_direction(self, theta, sample, score):
        rho, rho_grad = importance_ratios(self.policy, self._behavior, theta, sample.s, sample.a)
        self.last_rho_ = rho
        return rho_grad


class PGQDerived(_PGQBase):
    """PGQ variant whose delta correction keeps the target-policy likelihood ratio.

    Identical to PGQ except the third term uses grad pi(a|s) / pi(a|s) rather
    than grad pi(a|s) / b(a|s); with on-policy samples its expected
    theta-increment is exactly -(alpha/2) times the analytic objective
    gradient. Coincides with PGQ whenever behavior equals target.
    """

    def _delta_correction_direction(self, theta, sample, score):
        return score


ALGORITHMS = ("qlearning", "gq", "pgq-alg1", "pgq-derived")


def make_learner(
    algorithm: str,
    target_policy: BoltzmannPolicy,
    behavior_policy: BoltzmannPolicy,
    gamma: float,
    alpha: float,
    beta: float,
) -> BaseLearner:
    """Build a learner by its CLI name."""
    if algorithm == "qlearning":
        return QLearning(target_policy, gamma, alpha)
    if algorithm == "gq":
        return GQ(target_policy, gamma, alpha, beta)
    if algorithm == "pgq-alg1":
        return PGQ(target_policy, gamma, alpha, beta, behavior_policy=behavior_policy)
    if algorithm == "pgq-derived":
        return PGQDerived(target_policy, gamma, alpha, beta, behavior_policy=behavior_policy)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
