import argparse

from ...application import AttackRequestDTO
from ...domain.adversary import available_strategies
from ..dependencies import DEFAULT_CONFIG, DEFAULT_ROUNDS, DEFAULT_WORKERS, get_attack_use_case
from .common import add_execution_arguments, format_table, round_count


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "attack",
        help="evaluate an LOCC attacker strategy",
        description=f"Strategies: {', '.join(available_strategies())}",
    )
    parser.add_argument("--strategy", required=True, help="attacker strategy name")
    parser.add_argument("--config", default=DEFAULT_CONFIG, help="bundled config name or path")
    parser.add_argument("--bases", type=int, choices=(1, 2, 3), default=3, help="number of enabled bases")
    parser.add_argument("--n", type=round_count, default=DEFAULT_ROUNDS, help="number of rounds")
    parser.add_argument("--output", default=None, help="JSON attack report")
    add_execution_arguments(parser, DEFAULT_WORKERS)
    parser.set_defaults(handler=attack)


def attack(args: argparse.Namespace) -> int:
    """Evaluate an attack"""
    if args.seed is None:
        raise ValueError("--seed is required for Monte Carlo runs")
    dto = AttackRequestDTO(
        strategy=args.strategy,
        config=args.config,
        n=args.n,
        seed=args.seed,
        bases=args.bases,
        output=args.output,
        workers=args.workers,
    )
    report = get_attack_use_case().attack(dto)

    success = report.parity_guess_success
    print(f"strategy: {report.strategy.name} ({report.strategy.description})")
    print(f"bases: {', '.join(b.value for b in report.enabled_bases)}  rounds: {report.rounds}")
    print(
        format_table(
            ("quantity", "value", "lower", "upper"),
            [
                (name, f"{e.value:.4f}", f"{e.lower:.4f}", f"{e.upper:.4f}")
                for name, e in (
                    ("parity guess success", success),
                    ("P(0|parallel,concl.)", report.p0_parallel_conclusive),
                    ("P(1|orthogonal,concl.)", report.p1_orthogonal_conclusive),
                    ("P(inc|parallel)", report.verification_report.inconclusive_parallel),
                    ("P(inc|orthogonal)", report.verification_report.inconclusive_orthogonal),
                    ("pooled conclusive correctness", report.pooled_conclusive_correctness),
                )
            ],
        )
    )
    print(f"analytic LOCC bound: {report.analytic_bound:.4f}")
    print(f"timing feasible: {'yes' if report.timing_feasible else 'no'}")
    print(f"verdict: {report.verification.verdict.value}")
    for violation in report.verification.violations:
        print(f"  violation: {violation}")
    if args.output:
        print(f"wrote {args.output}")
    return 0
