"""LOCC intercept-measure adversaries.

Adversary E0 sits between V0 and the claimed position, E1 between the claimed
position and V1. Each measures the qubit of its nearest verifier, they swap one
classical message, and both send the same answer back.
"""
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..entities import (
    ANSWERS,
    AttackerStrategy,
    AttackReport,
    Arm,
    BASES,
    BASIS_STATES,
    Basis,
    BasisPolicy,
    Geometry,
    NO_PATTERN,
    PARITIES,
    Parity,
    PolarizationQubit,
    ProtocolSettings,
    ProverAnswer,
    ResponseBatch,
    ResponseRule,
    RoundSpec,
    SetupConfig,
    SpaceTimePoint,
    VerificationPolicy,
)
from ..errors import DomainError, PreconditionError, StrategyNotFoundError
from ..interfaces import ProverInterface
from ..protocol import (
    DEFAULT_SHARD_ROUNDS,
    Mapper,
    deadlines,
    execute_protocol,
    send_times,
    theoretical_distribution,
    verify,
    TIMING_RESOLUTION_S,
)
from ..randomness import ADVERSARY_SLOTS, RoundStream
from ..statistics import wilson_interval


ZERO = ANSWERS.index(ProverAnswer.ZERO)
ONE = ANSWERS.index(ProverAnswer.ONE)
INCONCLUSIVE = ANSWERS.index(ProverAnswer.INCONCLUSIVE)

BLIND_CLAIM_PROBABILITY = 0.5

# Layout of the adversary slice of a round stream
_BASIS_E0, _BASIS_E1, _OUTCOME_E0, _OUTCOME_E1, _RESPONSE, _MISMATCH_COIN = range(6)


def _born_table() -> np.ndarray:
    """P(outcome 0) indexed by (prepared basis, prepared state, measured basis)"""
    table = np.zeros((len(BASES), 2, len(BASES)))
    for b, basis in enumerate(BASES):
        for s, label in enumerate(BASIS_STATES[basis]):
            prepared = PolarizationQubit.from_label(label)
            for m, measured in enumerate(BASES):
                outcome_zero = PolarizationQubit.from_label(BASIS_STATES[measured][0])
                table[b, s, m] = abs(outcome_zero.inner(prepared)) ** 2
    return np.clip(table, 0.0, 1.0)


BORN_TABLE = _born_table()


def analytic_locc_bound(enabled_bases: int) -> float:
    """Intercept-strategy success (1/k)(1 + (k - 1)/2) for k mutually unbiased bases"""
    if enabled_bases not in (1, 2, 3):
        raise DomainError(f"Number of enabled bases must be 1, 2 or 3, got {enabled_bases}")
    return (1.0 + (enabled_bases - 1) / 2.0) / enabled_bases


def _strategy(name, policy, rule, description, fixed_basis=None, learns=False) -> AttackerStrategy:
    return AttackerStrategy(
        name=name,
        basis_policy=policy,
        response_rule=rule,
        fixed_basis=fixed_basis,
        learns_basis_after_measurement=learns,
        description=description,
    )


STRATEGIES: Dict[str, AttackerStrategy] = {
    s.name: s
    for s in (
        _strategy(
            "intercept3",
            BasisPolicy.SHARED_UNIFORM,
            ResponseRule.MIMIC_HONEST,
            "shared uniform basis guess, answers drawn like an honest prover for the guessed parity",
        ),
        _strategy(
            "intercept-direct",
            BasisPolicy.SHARED_UNIFORM,
            ResponseRule.DIRECT,
            "shared uniform basis guess, answers the guessed parity",
        ),
        _strategy(
            "intercept-hv",
            BasisPolicy.FIXED,
            ResponseRule.DIRECT,
            "always measures HV, answers the guessed parity",
            fixed_basis=Basis.HV,
        ),
        _strategy(
            "independent-bases",
            BasisPolicy.INDEPENDENT_UNIFORM,
            ResponseRule.DIRECT,
            "each adversary guesses its own basis",
        ),
        _strategy(
            "claim-loss",
            BasisPolicy.SHARED_UNIFORM,
            ResponseRule.CLAIM_LOSS,
            "answers inconclusive whenever the guessed basis was wrong",
            learns=True,
        ),
        _strategy(
            "claim-loss-mimic",
            BasisPolicy.SHARED_UNIFORM,
            ResponseRule.CLAIM_LOSS_MIMIC,
            "claims loss on a wrong basis, mimics the honest prover otherwise",
            learns=True,
        ),
        _strategy(
            "blind-claim-loss",
            BasisPolicy.SHARED_UNIFORM,
            ResponseRule.BLIND_CLAIM_LOSS,
            "claims loss at random without knowing the basis",
        ),
        _strategy("always-zero", BasisPolicy.SHARED_UNIFORM, ResponseRule.ALWAYS_ZERO, "always answers 0"),
        _strategy("always-one", BasisPolicy.SHARED_UNIFORM, ResponseRule.ALWAYS_ONE, "always answers 1"),
        _strategy("coin-flip", BasisPolicy.SHARED_UNIFORM, ResponseRule.COIN_FLIP, "answers a fair coin"),
    )
}


def available_strategies() -> List[str]:
    return sorted(STRATEGIES)


def get_strategy(name: str) -> AttackerStrategy:
    try:
        return STRATEGIES[name]
    except KeyError:
        raise StrategyNotFoundError(name, STRATEGIES) from None


def locc_strategies() -> List[AttackerStrategy]:
    """Strategies that never learn the round basis, i.e. genuinely LOCC"""
    return [s for s in STRATEGIES.values() if not s.learns_basis_after_measurement]


def _honest_cumulative(parity: Parity) -> Tuple[float, float]:
    answers = theoretical_distribution(parity)
    inconclusive = answers[ProverAnswer.INCONCLUSIVE]
    return inconclusive, inconclusive + answers[ProverAnswer.ZERO]


def _mimic_answers(guess_parallel: np.ndarray, u: np.ndarray) -> np.ndarray:
    answers = np.empty(len(u), dtype=np.int8)
    for parity, selected in ((Parity.PARALLEL, guess_parallel), (Parity.ORTHOGONAL, ~guess_parallel)):
        inconclusive, zero = _honest_cumulative(parity)
        answers[selected] = np.where(
            u[selected] < inconclusive, INCONCLUSIVE, np.where(u[selected] < zero, ZERO, ONE)
        )
    return answers


def _measurement_bases(
    strategy: AttackerStrategy, enabled_codes: np.ndarray, u: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    k = len(enabled_codes)
    n = len(u)
    if strategy.basis_policy is BasisPolicy.FIXED:
        fixed = np.full(n, BASES.index(strategy.fixed_basis), dtype=np.int8)
        return fixed, fixed
    e0 = enabled_codes[np.minimum((u[:, _BASIS_E0] * k).astype(np.int64), k - 1)]
    if strategy.basis_policy is BasisPolicy.SHARED_UNIFORM:
        return e0, e0
    e1 = enabled_codes[np.minimum((u[:, _BASIS_E1] * k).astype(np.int64), k - 1)]
    return e0, e1


def intercept_measure_codes(
    strategy: AttackerStrategy,
    enabled_bases: Iterable[Basis],
    basis: np.ndarray,
    parity: np.ndarray,
    first_state: np.ndarray,
    uniforms: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Answer codes and parity-guess correctness for a batch, one row of adversary uniforms per round"""
    enabled_codes = np.array([BASES.index(Basis(b)) for b in enabled_bases], dtype=np.int8)
    u = np.asarray(uniforms, dtype=float)
    basis = np.asarray(basis, dtype=np.int64)
    parallel = np.asarray(parity) == PARITIES.index(Parity.PARALLEL)
    state_0 = np.asarray(first_state, dtype=np.int64)
    state_1 = np.where(parallel, state_0, 1 - state_0)

    measured_0, measured_1 = _measurement_bases(strategy, enabled_codes, u)
    outcome_0 = u[:, _OUTCOME_E0] >= BORN_TABLE[basis, state_0, measured_0]
    outcome_1 = u[:, _OUTCOME_E1] >= BORN_TABLE[basis, state_1, measured_1]

    # records from different bases carry no parity information
    guess_parallel = np.where(
        measured_0 == measured_1, outcome_0 == outcome_1, u[:, _MISMATCH_COIN] < 0.5
    )
    guess_correct = guess_parallel == parallel

    direct = np.where(guess_parallel, ZERO, ONE).astype(np.int8)
    matched = (measured_0 == basis) & (measured_1 == basis)
    response = u[:, _RESPONSE]
    rule = strategy.response_rule
    if rule is ResponseRule.DIRECT:
        answers = direct
    elif rule is ResponseRule.MIMIC_HONEST:
        answers = _mimic_answers(guess_parallel, response)
    elif rule is ResponseRule.CLAIM_LOSS:
        answers = np.where(matched, direct, INCONCLUSIVE)
    elif rule is ResponseRule.CLAIM_LOSS_MIMIC:
        answers = np.where(matched, _mimic_answers(guess_parallel, response), INCONCLUSIVE)
    elif rule is ResponseRule.BLIND_CLAIM_LOSS:
        answers = np.where(response < BLIND_CLAIM_PROBABILITY, INCONCLUSIVE, direct)
    elif rule is ResponseRule.ALWAYS_ZERO:
        answers = np.full(len(u), ZERO)
    elif rule is ResponseRule.ALWAYS_ONE:
        answers = np.full(len(u), ONE)
    else:
        answers = np.where(response < 0.5, ZERO, ONE)
    return np.asarray(answers, dtype=np.int8), guess_correct


def adversary_arrivals(
    send_v0: np.ndarray,
    send_v1: np.ndarray,
    geometry: Geometry,
    position_e0_m: float,
    position_e1_m: float,
    processing_time_s: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Answer arrival times after one classical exchange between the adversaries"""
    speed = geometry.signal_speed_m_per_s
    leg_0 = geometry.time_of_flight(Arm.V0, position_e0_m)
    leg_1 = geometry.time_of_flight(Arm.V1, position_e1_m)
    exchange = abs(position_e1_m - position_e0_m) / speed
    intercept_0 = send_v0 + leg_0
    intercept_1 = send_v1 + leg_1
    ready_0 = np.maximum(intercept_0, intercept_1 + exchange) + processing_time_s
    ready_1 = np.maximum(intercept_1, intercept_0 + exchange) + processing_time_s
    return ready_0 + leg_0, ready_1 + leg_1


@dataclass(frozen=True)
class AdversaryProver(ProverInterface):
    """Two colluding adversaries answering in place of the prover"""
    strategy: AttackerStrategy
    position_e0_m: Optional[float] = None
    position_e1_m: Optional[float] = None
    processing_time_s: float = 0.0

    def positions(self, geometry: Geometry) -> Tuple[float, float]:
        e0 = self.position_e0_m
        e1 = self.position_e1_m
        if e0 is None:
            e0 = 0.5 * (geometry.v0_position_m + geometry.prover_position_m)
        if e1 is None:
            e1 = 0.5 * (geometry.prover_position_m + geometry.v1_position_m)
        if not geometry.v0_position_m < e0 < geometry.prover_position_m < e1 < geometry.v1_position_m:
            raise PreconditionError("Adversaries must sit strictly between each verifier and the prover")
        return e0, e1

    def respond(self, batch, uniforms, geometry, settings) -> ResponseBatch:
        e0, e1 = self.positions(geometry)
        answers, guess_correct = intercept_measure_codes(
            self.strategy,
            settings.enabled_bases,
            batch.basis,
            batch.parity,
            batch.first_state,
            uniforms[:, ADVERSARY_SLOTS],
        )
        t_v0, t_v1 = adversary_arrivals(
            batch.send_v0, batch.send_v1, geometry, e0, e1, self.processing_time_s
        )
        return ResponseBatch(
            pattern=np.full(len(batch), NO_PATTERN, dtype=np.int16),
            answer_v0=answers,
            answer_v1=answers.copy(),
            t_v0=t_v0,
            t_v1=t_v1,
            parity_guess_correct=guess_correct,
        )


def intercept_measure_attack(
    enabled_bases: Iterable[Basis],
    rng_stream: RoundStream,
    round: RoundSpec,
    strategy: Optional[AttackerStrategy] = None,
    geometry: Optional[Geometry] = None,
    settings: Optional[ProtocolSettings] = None,
) -> Tuple[ProverAnswer, bool]:
    """One intercepted round: the common answer and whether it meets both deadlines"""
    strategy = strategy or STRATEGIES["intercept-direct"]
    geometry = geometry or Geometry(0.0, 100.0, 200.0)
    settings = settings or ProtocolSettings(enabled_bases=tuple(enabled_bases))
    labels = BASIS_STATES[round.basis]
    first_state = 0 if abs(round.qubit_0.inner(PolarizationQubit.from_label(labels[0]))) ** 2 > 0.5 else 1
    answers, _ = intercept_measure_codes(
        strategy,
        enabled_bases,
        np.array([BASES.index(round.basis)]),
        np.array([PARITIES.index(round.parity)]),
        np.array([first_state]),
        rng_stream.adversary[np.newaxis, :],
    )
    send_v0, send_v1 = send_times(np.array([rng_stream.round_index]), geometry, settings)
    e0, e1 = AdversaryProver(strategy).positions(geometry)
    deadline_v0, deadline_v1 = deadlines(send_v0, send_v1, geometry, settings)
    # Both measurements must lie in the past light cone of both deadlines
    intercepts = (
        SpaceTimePoint(e0, float(send_v0[0]) + geometry.time_of_flight(Arm.V0, e0)),
        SpaceTimePoint(e1, float(send_v1[0]) + geometry.time_of_flight(Arm.V1, e1)),
    )
    answer_deadlines = (
        SpaceTimePoint(geometry.v0_position_m, float(deadline_v0[0])),
        SpaceTimePoint(geometry.v1_position_m, float(deadline_v1[0])),
    )
    feasible = all(
        event.can_signal(deadline, geometry.signal_speed_m_per_s, TIMING_RESOLUTION_S)
        for event in intercepts
        for deadline in answer_deadlines
    )
    return ANSWERS[answers[0]], feasible


def evaluate_attack(
    strategy: AttackerStrategy,
    n: int,
    setup: SetupConfig,
    enabled_bases: Iterable[Basis],
    master_seed: int,
    policy: Optional[VerificationPolicy] = None,
    mapper: Mapper = map,
    shard_rounds: int = DEFAULT_SHARD_ROUNDS,
) -> AttackReport:
    """Run the protocol with the adversaries substituted for the prover"""
    bases = tuple(Basis(b) for b in enabled_bases)
    settings = replace(setup.protocol, enabled_bases=bases)
    run = execute_protocol(
        n, AdversaryProver(strategy), setup.geometry, settings, master_seed, mapper, shard_rounds
    )
    verification = verify(run.report, policy or VerificationPolicy.ideal())
    return AttackReport(
        strategy=strategy,
        enabled_bases=bases,
        rounds=n,
        parity_guess_success=wilson_interval(run.parity_guesses_correct, n),
        analytic_bound=analytic_locc_bound(len(bases)),
        timing_feasible=run.report.round_checks_passed,
        verification_report=run.report,
        verification=verification,
    )
