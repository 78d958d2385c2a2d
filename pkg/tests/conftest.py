import pytest

from pgq import BoltzmannPolicy, build_baird_star, build_random_mdp, onehot_features
from pgq.objectives import ObjectiveWorkspace


@pytest.fixture(scope="session")
def baird():
    """(mdp, features, theta_init) for the 7-state star problem."""
    return build_baird_star()


@pytest.fixture(scope="session")
def toy():
    """Full-rank toy problem: 3 states, 2 actions, one-hot features.

    Returns (mdp, features, policy, workspace); the feature covariance is
    diagonal and strictly positive, so every pseudo-inverse is a true inverse.
    """
    mdp = build_random_mdp(3, 2, gamma=0.9, seed=20_240)
    features = onehot_features(3, 2)
    policy = BoltzmannPolicy(features, tau=0.7)
    workspace = ObjectiveWorkspace(mdp, features, policy, state_weights=(0.2, 0.3, 0.5))
    return mdp, features, policy, workspace
