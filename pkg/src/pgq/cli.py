"""Command-line interface.

Subcommands: ``baird-sampled``, ``baird-trajectory``, ``grad-check``.
Exit codes: 0 success, 1 configuration error (including bad flags),
2 numerical failure (gradient check over tolerance, or every run diverged).
"""

from __future__ import annotations

import argparse
import sys

from .exceptions import ConfigError, NumericalError
from .harness import ExperimentConfig, grad_check, run_sampled, run_trajectory, write_csv
from .learners import ALGORITHMS


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit 1 (config error), not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_experiment_flags(parser, *, alpha, beta, tau_target, tau_behavior, steps, runs):
    parser.add_argument("--algo", required=True, choices=ALGORITHMS, help="update rule to run")
    parser.add_argument("--alpha", type=float, default=alpha, help="theta step size")
    parser.add_argument("--beta", type=float, default=beta, help="auxiliary-weight step size")
    parser.add_argument("--tau-target", type=float, default=tau_target, help="target policy temperature")
    parser.add_argument(
        "--tau-behavior",
        type=float,
        default=tau_behavior,
        help="behavior policy temperature (defaults to --tau-target: on-policy)",
    )
    parser.add_argument("--steps", type=int, default=steps, help="number of update steps")
    parser.add_argument("--runs", type=int, default=runs, help="independent repetitions")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--measure-every", type=int, default=10, help="measurement cadence in steps")
    parser.add_argument("--out", required=True, metavar="PATH", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pgq", description="Baird-star experiments for gradient TD control learners")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sampled = sub.add_parser("baird-sampled", help="i.i.d. uniform start states each step")
    _add_experiment_flags(
        sampled, alpha=0.01, beta=0.25, tau_target=0.4, tau_behavior=None, steps=5_000, runs=1
    )

    trajectory = sub.add_parser("baird-trajectory", help="single simulated trajectory per run")
    _add_experiment_flags(
        trajectory, alpha=0.0125, beta=0.0421875, tau_target=0.8, tau_behavior=10.0, steps=20_000, runs=10
    )

    check = sub.add_parser("grad-check", help="certify the analytic objective gradient")
    check.add_argument("--draws", type=int, default=20, help="random theta draws per problem")
    check.add_argument("--seed", type=int, default=0, help="seed for the theta draws")
    return parser


def _run_experiment(args, mode: str) -> int:
    config = ExperimentConfig(
        mode=mode,
        algorithm=args.algo,
        alpha=args.alpha,
        beta=args.beta,
        tau_target=args.tau_target,
        tau_behavior=args.tau_behavior,
        steps=args.steps,
        runs=args.runs,
        seed=args.seed,
        measure_every=args.measure_every,
        output_path=args.out,
    )
    config.validate()
    series = run_sampled(config) if mode == "sampled" else run_trajectory(config)
    write_csv(series, args.out)

    finals = [series.for_run(run)[-1] for run in series.run_indices()]
    mean_final = sum(row.mspbe for row in finals) / len(finals)
    print(
        f"wrote {args.out}: {config.runs} run(s), {len(series.rows)} rows, "
        f"final MSPBE mean {mean_final:.6g}"
    )
    if all(row.diverged for row in finals):
        print("every run diverged", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "baird-sampled":
            return _run_experiment(args, "sampled")
        if args.command == "baird-trajectory":
            return _run_experiment(args, "trajectory")
        report = grad_check(theta_draws=args.draws, seed=args.seed)
        for line in report.lines():
            print(line)
        return 0 if report.passed else 2
    except ConfigError as exc:
        print(f"pgq: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"pgq: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
