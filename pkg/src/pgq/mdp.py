"""Finite MDPs, linear state-action features, and the Baird star problem.

All state-action quantities in this package share one flattening convention:
the row for pair (s, a) sits at index ``s * n_actions + a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .validation import (
    DIST_TOL,
    as_float_array,
    check_index,
    check_probability_rows,
    check_unit_interval,
)

# Baird star actions: SOLID always enters the centre state, DASHED scatters
# uniformly over the six outer states.
SOLID = 0
DASHED = 1


@dataclass(frozen=True)
class TabularMdp:
    """Finite MDP with a dense transition tensor and per-pair rewards.

    Attributes:
        transition: (n_states, n_actions, n_states) tensor; every (s, a) row
            is a probability distribution over next states.
        reward: (n_states, n_actions) table of expected rewards.
        gamma: discount factor, strictly inside (0, 1).
    """

    transition: np.ndarray
    reward: np.ndarray
    gamma: float

    def __post_init__(self):
        t = as_float_array(self.transition, "transition", ndim=3)
        if t.shape[0] != t.shape[2]:
            raise ValueError(f"transition must be (S, A, S), got {t.shape}")
        check_probability_rows(t, "transition")
        r = as_float_array(self.reward, "reward", ndim=2)
        if r.shape != t.shape[:2]:
            raise ValueError(f"reward shape {r.shape} does not match transition {t.shape[:2]}")
        g = check_unit_interval(self.gamma, "gamma")
        t.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "reward", r)
        object.__setattr__(self, "gamma", g)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]


@dataclass(frozen=True)
class FeatureMap:
    """Linear basis over state-action pairs.

    ``phi[s, a]`` is the length-k feature vector of pair (s, a); ``stacked()``
    materializes the (n_states * n_actions, k) matrix whose row for (s, a) is
    ``phi[s, a]`` at index ``s * n_actions + a``.
    """

    phi: np.ndarray

    def __post_init__(self):
        p = as_float_array(self.phi, "phi", ndim=3)
        p.flags.writeable = False
        object.__setattr__(self, "phi", p)

    @property
    def n_states(self) -> int:
        return self.phi.shape[0]

    @property
    def n_actions(self) -> int:
        return self.phi.shape[1]

    @property
    def k(self) -> int:
        return self.phi.shape[2]

    def vector(self, s: int, a: int) -> np.ndarray:
        check_index(s, self.n_states, "state")
        check_index(a, self.n_actions, "action")
        return self.phi[s, a]

    def stacked(self) -> np.ndarray:
        return self.phi.reshape(self.n_states * self.n_actions, self.k)


@dataclass(frozen=True)
class StateActionDistribution:
    """Distribution over state-action pairs, flattened as ``s * n_actions + a``."""

    d: np.ndarray
    n_actions: int

    def __post_init__(self):
        d = as_float_array(self.d, "d", ndim=1)
        if np.any(d < -DIST_TOL):
            raise ValueError("distribution has negative entries")
        d = np.clip(d, 0.0, None)
        if abs(d.sum() - 1.0) > DIST_TOL:
            raise ValueError(f"distribution sums to {d.sum()!r}, expected 1 within {DIST_TOL}")
        d.flags.writeable = False
        object.__setattr__(self, "d", d)

    def state_marginal(self) -> np.ndarray:
        """Per-state occupancy, summing out the action."""
        return self.d.reshape(-1, self.n_actions).sum(axis=1)


def build_baird_star() -> tuple[TabularMdp, FeatureMap, np.ndarray]:
    """Construct the 7-state, 2-action star problem with its blockwise features.

    SOLID moves to the centre state (index 6) with probability 1 from every
    state; DASHED lands uniformly on the six outer states. All rewards are 0
    and gamma = 0.99. The per-state basis is x(s_i) = 2 e_i + e_8 for the six
    outer states and x(s_7) = e_7 + 2 e_8; each action owns an 8-entry block,
    phi(s, SOLID) = [x(s); 0] and phi(s, DASHED) = [0; x(s)], so k = 16.

    Returns (mdp, features, theta_init) where theta_init has the SOLID block
    set to (1, 1, 1, 1, 1, 1, 1, 10) and the DASHED block all ones.
    """
    n_states, n_actions = 7, 2
    centre = n_states - 1

    transition = np.zeros((n_states, n_actions, n_states))
    transition[:, SOLID, centre] = 1.0
    transition[:, DASHED, :centre] = 1.0 / (n_states - 1)
    reward = np.zeros((n_states, n_actions))
    mdp = TabularMdp(transition, reward, gamma=0.99)

    basis = np.zeros((n_states, 8))
    for i in range(centre):
        basis[i, i] = 2.0
        basis[i, 7] = 1.0
    basis[centre, 6] = 1.0
    basis[centre, 7] = 2.0

    phi = np.zeros((n_states, n_actions, 16))
    phi[:, SOLID, :8] = basis
    phi[:, DASHED, 8:] = basis
    features = FeatureMap(phi)

    theta_init = np.ones(16)
    theta_init[7] = 10.0
    return mdp, features, theta_init


def build_random_mdp(n_states: int, n_actions: int, gamma: float = 0.9, seed: int = 0) -> TabularMdp:
    """Seeded dense MDP with strictly positive transition rows; handy for oracles."""
    rng = np.random.default_rng(seed)
    transition = rng.uniform(0.1, 1.0, size=(n_states, n_actions, n_states))
    transition /= transition.sum(axis=2, keepdims=True)
    reward = rng.normal(size=(n_states, n_actions))
    return TabularMdp(transition, reward, gamma)


def onehot_features(n_states: int, n_actions: int) -> FeatureMap:
    """Indicator basis: one feature per state-action pair (k = S * A, full rank)."""
    n = n_states * n_actions
    return FeatureMap(np.eye(n).reshape(n_states, n_actions, n))


def sample_transition(mdp: TabularMdp, s: int, a: int, rng: np.random.Generator) -> tuple[int, float]:
    """Draw (s', r) from the model; deterministic given the rng state."""
    s = check_index(s, mdp.n_states, "state")
    a = check_index(a, mdp.n_actions, "action")
    s_next = int(rng.choice(mdp.n_states, p=mdp.transition[s, a]))
    return s_next, float(mdp.reward[s, a])


def state_action_transition_matrix(mdp: TabularMdp, policy, theta: np.ndarray) -> np.ndarray:
    """Pair-to-pair transition operator P[(s,a),(s',a')] = t(s,a,s') pi(a'|s')."""
    pi = policy.probabilities_all(theta)
    n = mdp.n_states * mdp.n_actions
    return (mdp.transition[:, :, :, None] * pi[None, None, :, :]).reshape(n, n)


def stationary_distribution(
    mdp: TabularMdp,
    policy,
    theta: np.ndarray,
    method: str = "power",
    max_iter: int = 100_000,
    tol: float = 1e-12,
) -> StateActionDistribution:
    """Long-run occupancy of the chain induced by the policy.

    ``method="power"`` iterates d <- d P from uniform until the successive
    max-norm change falls below ``tol``, falling back to the direct linear
    solve if the cap is hit; ``method="direct"`` solves (P^T - I) d = 0 with
    a normalization row appended. Raises NumericalError (carrying the
    residual) if the result does not satisfy d P = d within 1e-9.
    """
    if method not in ("power", "direct"):
        raise ValueError(f"unknown method {method!r}")
    p = state_action_transition_matrix(mdp, policy, theta)
    n = p.shape[0]

    d = None
    if method == "power":
        d = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            d_next = d @ p
            d_next /= d_next.sum()
            if np.max(np.abs(d_next - d)) < tol:
                d = d_next
                break
            d = d_next
        else:
            d = None  # fall through to the direct solve

    if d is None:
        a = np.vstack([p.T - np.eye(n), np.ones((1, n))])
        b = np.zeros(n + 1)
        b[-1] = 1.0
        d, *_ = np.linalg.lstsq(a, b, rcond=None)
        d = np.clip(d, 0.0, None)
        d /= d.sum()

    residual = float(np.max(np.abs(d @ p - d)))
    if residual > 1e-9:
        raise NumericalError(
            f"stationary distribution did not converge: residual {residual:g}",
            residual=residual,
        )
    return StateActionDistribution(d, mdp.n_actions)
