"""Experiment harness: seeded Baird-star runs, exact metric logging, CSV I/O.

Determinism contract: one master seed; run i draws from a generator built as
``default_rng(SeedSequence(entropy=seed, spawn_key=(i,)))``, so every run's
stream is independent of how many other runs execute and in what order.
Within a run, draws happen in a fixed order (state if sampled mode, action,
next state).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError
from .learners import ALGORITHMS, TransitionSample, make_learner
from .mdp import build_baird_star, build_random_mdp, onehot_features, sample_transition
from .objectives import ObjectiveWorkspace
from .policy import BoltzmannPolicy

MODES = ("sampled", "trajectory")
CSV_HEADER = "algorithm,run,step,mspbe,mstde,diverged"


@dataclass
class ExperimentConfig:
    """Settings for one Baird experiment (one algorithm, possibly many runs)."""

    mode: str
    algorithm: str
    alpha: float = 0.01
    beta: float = 0.25
    tau_target: float = 0.4
    tau_behavior: float | None = None  # None: behave on-policy (same as target)
    steps: int = 20_000
    runs: int = 1
    seed: int = 0
    measure_every: int = 10
    output_path: str | None = None

    def resolved_tau_behavior(self) -> float:
        return self.tau_target if self.tau_behavior is None else self.tau_behavior

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.steps < 0:
            raise ConfigError(f"steps must be >= 0, got {self.steps}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.measure_every < 1:
            raise ConfigError(f"measure_every must be >= 1, got {self.measure_every}")
        if not self.tau_target > 0 or not self.resolved_tau_behavior() > 0:
            raise ConfigError("temperatures must be positive")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("step sizes must be >= 0")


@dataclass(frozen=True)
class MetricRow:
    run: int
    step: int
    mspbe: float
    mstde: float
    diverged: bool


@dataclass
class MetricSeries:
    """Per-step exact metrics for every run of one algorithm."""

    algorithm: str
    rows: list[MetricRow] = field(default_factory=list)

    def for_run(self, run: int) -> list[MetricRow]:
        return [row for row in self.rows if row.run == run]

    def run_indices(self) -> list[int]:
        return sorted({row.run for row in self.rows})


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """The documented per-run stream split."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(run_index,)))


def run_sampled(config: ExperimentConfig) -> MetricSeries:
    """Sampled-update protocol: i.i.d. start states, uniform over the 7 states.

    Each step draws s uniformly, an action from the sampling Boltzmann policy
    (temperature tau_behavior, which defaults to tau_target for the on-policy
    case) over the live theta, and s' from the model; rewards are identically
    zero on the star problem.
    """
    if config.mode != "sampled":
        raise ConfigError(f"run_sampled requires mode='sampled', got {config.mode!r}")
    return _run(config)


def run_trajectory(config: ExperimentConfig) -> MetricSeries:
    """Trajectory protocol: a single simulated walk through the MDP per run.

    The start state is uniform; afterwards the state follows the sampled
    transitions while actions come from the behavior Boltzmann policy over
    the live theta. Metrics are measured against the same uniform-state
    distribution as the sampled protocol.
    """
    if config.mode != "trajectory":
        raise ConfigError(f"run_trajectory requires mode='trajectory', got {config.mode!r}")
    return _run(config)


def _run(config: ExperimentConfig) -> MetricSeries:
    config.validate()
    mdp, features, theta_init = build_baird_star()
    target = BoltzmannPolicy(features, config.tau_target)
    behavior = BoltzmannPolicy(features, config.resolved_tau_behavior())
    workspace = ObjectiveWorkspace(mdp, features, target)

    series = MetricSeries(config.algorithm)
    for run in range(config.runs):
        rng = run_rng(config.seed, run)
        learner = make_learner(
            config.algorithm, target, behavior, mdp.gamma, config.alpha, config.beta
        ).reset(theta_init)

        s = int(rng.integers(mdp.n_states)) if config.mode == "trajectory" else -1
        last_mspbe = workspace.mspbe(learner.theta_)
        last_mstde = workspace.mstde(learner.theta_)
        series.rows.append(MetricRow(run, 0, last_mspbe, last_mstde, False))

        for step in range(1, config.steps + 1):
            if not learner.diverged_:
                if config.mode == "sampled":
                    s = int(rng.integers(mdp.n_states))
                a = behavior.sample_action(learner.theta_, s, rng)
                s_next, r = sample_transition(mdp, s, a, rng)
                learner.partial_fit(TransitionSample(s, a, r, s_next))
                if config.mode == "trajectory":
                    s = s_next
            if step % config.measure_every == 0 or step == config.steps:
                if not learner.diverged_:
                    last_mspbe = workspace.mspbe(learner.theta_)
                    last_mstde = workspace.mstde(learner.theta_)
                series.rows.append(MetricRow(run, step, last_mspbe, last_mstde, learner.diverged_))
    return series


# -- CSV ----------------------------------------------------------------------------


def write_csv(series: MetricSeries, path) -> None:
    """Write the series atomically (temp file, then rename).

    Schema: ``algorithm,run,step,mspbe,mstde,diverged`` with reals printed in
    full round-trip precision and diverged in {0, 1}.
    """
    path = os.fspath(path)
    lines = [CSV_HEADER]
    for row in series.rows:
        lines.append(
            f"{series.algorithm},{row.run},{row.step},"
            f"{float(row.mspbe)!r},{float(row.mstde)!r},{int(row.diverged)}"
        )
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc


def read_csv(path) -> MetricSeries:
    """Parse a file produced by write_csv back into a MetricSeries."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path!r} does not carry the expected header {CSV_HEADER!r}")
    algorithm = ""
    rows = []
    for line in lines[1:]:
        algo, run, step, mspbe, mstde, diverged = line.split(",")
        algorithm = algo
        rows.append(MetricRow(int(run), int(step), float(mspbe), float(mstde), diverged == "1"))
    return MetricSeries(algorithm, rows)


# -- gradient certification ----------------------------------------------------------


@dataclass(frozen=True)
class GradCheckProblem:
    name: str
    draws: int
    max_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_relative_error < self.tolerance


@dataclass(frozen=True)
class GradCheckReport:
    problems: tuple[GradCheckProblem, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.problems)

    def lines(self) -> list[str]:
        out = []
        for p in self.problems:
            status = "ok" if p.passed else "FAIL"
            out.append(
                f"[{status}] {p.name}: max relative error {p.max_relative_error:.3e} "
                f"over {p.draws} draws (tolerance {p.tolerance:.0e})"
            )
        return out


def _relative_error(approx: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(reference))), 1e-12)
    return float(np.max(np.abs(approx - reference))) / scale


def grad_check(theta_draws: int = 20, seed: int = 0, h: float = 1e-5, tolerance: float = 5e-5) -> GradCheckReport:
    """Certify the analytic objective gradient against central differences.

    Runs on a fixed full-rank one-hot toy problem (full comparison) and on
    the rank-deficient Baird star (comparison projected onto the row space
    of the feature matrix, where the pseudo-inverse derivative is exact).
    """
    if theta_draws < 1:
        raise ConfigError(f"theta_draws must be >= 1, got {theta_draws}")
    rng = np.random.default_rng(seed)
    problems = []

    toy_mdp = build_random_mdp(3, 2, gamma=0.9, seed=20_240)
    toy_features = onehot_features(3, 2)
    toy_policy = BoltzmannPolicy(toy_features, tau=0.7)
    toy_ws = ObjectiveWorkspace(toy_mdp, toy_features, toy_policy, state_weights=(0.2, 0.3, 0.5))
    worst = 0.0
    for _ in range(theta_draws):
        theta = rng.normal(size=toy_features.k)
        analytic = toy_ws.mspbe_gradient(theta)
        numeric = toy_ws.finite_difference_gradient(theta, h)
        worst = max(worst, _relative_error(analytic, numeric))
    problems.append(GradCheckProblem("one-hot toy (full)", theta_draws, worst, tolerance))

    baird_mdp, baird_features, _ = build_baird_star()
    baird_policy = BoltzmannPolicy(baird_features, tau=0.4)
    baird_ws = ObjectiveWorkspace(baird_mdp, baird_features, baird_policy)
    phi = baird_features.stacked()
    _, singular, vt = np.linalg.svd(phi, full_matrices=False)
    basis = vt[singular > 1e-10 * singular[0]]
    projector = basis.T @ basis
    worst = 0.0
    for _ in range(theta_draws):
        theta = rng.normal(size=baird_features.k)
        analytic = projector @ baird_ws.mspbe_gradient(theta)
        numeric = projector @ baird_ws.finite_difference_gradient(theta, h)
        worst = max(worst, _relative_error(analytic, numeric))
    problems.append(GradCheckProblem("baird star (row-space projected)", theta_draws, worst, tolerance))

    return GradCheckReport(tuple(problems))
