"""SWAP protocol: verifier preparation, prover answers, round check and verification."""
import math
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..entities import (
    ANSWERS,
    BASES,
    Basis,
    ClickPattern,
    CountsTable,
    Detector,
    Geometry,
    NO_PATTERN,
    OutcomeDistribution,
    PARITIES,
    Parity,
    PATTERN_COUNT,
    ProtocolSettings,
    ProverAnswer,
    ResponseBatch,
    RoundBatch,
    RoundSpec,
    SetupConfig,
    SourceParams,
    Transcript,
    TranscriptEntry,
    VerificationPolicy,
    VerificationReport,
    VerificationResult,
    Verdict,
    Arm,
)
from ..errors import ConfigError, PreconditionError
from ..interfaces import ProverInterface
from ..optics import (
    OpticalNetwork,
    distribution_for_overlap,
    exact_outcome_distribution,
    round_overlap,
    sample_patterns,
)
from ..randomness import OPTICS_SLOTS, PREPARATION_SLOTS, RoundStream, round_uniforms
from ..statistics import pooled_estimate, wilson_interval


LOCC_BOUND = 2.0 / 3.0
DEFAULT_SHARD_ROUNDS = 65536
# Clock resolution of the verifiers' arrival-time comparison
TIMING_RESOLUTION_S = 1e-12

ZERO, ONE, INCONCLUSIVE = (ANSWERS.index(a) for a in ANSWERS)
_SAME_SPLITTER_PAIRS = {int(Detector.A | Detector.B), int(Detector.C | Detector.D)}


def answer_from_pattern(pattern: ClickPattern) -> ProverAnswer:
    """AB or CD gives 0, any other two-detector pattern gives 1, everything else is inconclusive"""
    if pattern.cardinality != 2:
        return ProverAnswer.INCONCLUSIVE
    if pattern.mask in _SAME_SPLITTER_PAIRS:
        return ProverAnswer.ZERO
    return ProverAnswer.ONE


ANSWER_CODES = np.array(
    [ANSWERS.index(answer_from_pattern(ClickPattern(mask))) for mask in range(PATTERN_COUNT)],
    dtype=np.int8,
)


def draw_round_codes(
    uniforms: np.ndarray, enabled_bases: Sequence[Basis]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Basis, parity and first-state codes from rows of three preparation uniforms"""
    enabled = tuple(enabled_bases)
    if not enabled:
        raise ConfigError("protocol.enabled_bases", "at least one basis must be enabled")
    u = np.asarray(uniforms, dtype=float)
    enabled_codes = np.array([BASES.index(Basis(b)) for b in enabled], dtype=np.int8)
    choice = np.minimum((u[:, 0] * len(enabled)).astype(np.int64), len(enabled) - 1)
    basis = enabled_codes[choice]
    parity = np.where(u[:, 1] < 0.5, 0, 1).astype(np.int8)
    first_state = np.where(u[:, 2] < 0.5, 0, 1).astype(np.int8)
    return basis, parity, first_state


def draw_round(rng_stream: RoundStream, enabled_bases: Iterable[Basis]) -> RoundSpec:
    basis, parity, first_state = draw_round_codes(
        rng_stream.preparation[np.newaxis, :], tuple(enabled_bases)
    )
    return RoundSpec.build(BASES[basis[0]], PARITIES[parity[0]], int(first_state[0]))


# -- timing ---------------------------------------------------------------

def send_times(
    round_index: np.ndarray, geometry: Geometry, settings: ProtocolSettings
) -> Tuple[np.ndarray, np.ndarray]:
    """Send times chosen so that both qubits meet at the claimed position at k * period"""
    t_meet = np.asarray(round_index, dtype=float) * settings.round_period_s
    return t_meet - geometry.time_of_flight(Arm.V0), t_meet - geometry.time_of_flight(Arm.V1)


def deadlines(
    send_v0: np.ndarray, send_v1: np.ndarray, geometry: Geometry, settings: ProtocolSettings
) -> Tuple[np.ndarray, np.ndarray]:
    tof0 = geometry.time_of_flight(Arm.V0)
    tof1 = geometry.time_of_flight(Arm.V1)
    return (
        send_v0 + tof0 + settings.processing_time_s + tof0 + settings.tolerance_s,
        send_v1 + tof1 + settings.processing_time_s + tof1 + settings.tolerance_s,
    )


def prover_arrivals(
    send_v0: np.ndarray,
    send_v1: np.ndarray,
    geometry: Geometry,
    settings: ProtocolSettings,
    position_m: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Answer arrival times for a prover at position_m that waits for both qubits"""
    tof0 = geometry.time_of_flight(Arm.V0, position_m)
    tof1 = geometry.time_of_flight(Arm.V1, position_m)
    departure = np.maximum(send_v0 + tof0, send_v1 + tof1) + settings.processing_time_s
    return departure + tof0, departure + tof1


def round_checks(
    answer_v0: np.ndarray,
    answer_v1: np.ndarray,
    t_v0: np.ndarray,
    t_v1: np.ndarray,
    send_v0: np.ndarray,
    send_v1: np.ndarray,
    geometry: Geometry,
    settings: ProtocolSettings,
) -> np.ndarray:
    deadline_v0, deadline_v1 = deadlines(send_v0, send_v1, geometry, settings)
    return (
        (answer_v0 == answer_v1)
        & (t_v0 <= deadline_v0 + TIMING_RESOLUTION_S)
        & (t_v1 <= deadline_v1 + TIMING_RESOLUTION_S)
    )


def round_check(
    entry: TranscriptEntry,
    geometry: Geometry,
    tolerance: float,
    settings: Optional[ProtocolSettings] = None,
) -> bool:
    """Both verifiers saw the same answer, each before its deadline"""
    settings = replace(settings or ProtocolSettings(), tolerance_s=tolerance)
    send_v0, send_v1 = send_times(np.array([entry.round_index]), geometry, settings)
    passed = round_checks(
        np.array([ANSWERS.index(entry.answer_v0)]),
        np.array([ANSWERS.index(entry.answer_v1)]),
        np.array([entry.t_v0]),
        np.array([entry.t_v1]),
        send_v0,
        send_v1,
        geometry,
        settings,
    )
    return bool(passed[0])


# -- provers --------------------------------------------------------------

def overlap_table(source: SourceParams) -> np.ndarray:
    """Signal-pair overlap indexed by (basis, parity, first_state) codes"""
    table = np.zeros((len(BASES), len(PARITIES), 2))
    for b, basis in enumerate(BASES):
        for p, parity in enumerate(PARITIES):
            for s in (0, 1):
                table[b, p, s] = round_overlap(source, RoundSpec.build(basis, parity, s))
    return table


@dataclass(frozen=True)
class HonestProver(ProverInterface):
    """Prover running the interferometric measurement; may sit away from the claimed position"""
    source: SourceParams
    setup: SetupConfig
    displacement_m: float = 0.0

    def respond(self, batch, uniforms, geometry, settings) -> ResponseBatch:
        network = OpticalNetwork.from_setup(self.setup)
        overlaps = overlap_table(self.source)[batch.basis, batch.parity, batch.first_state]
        patterns = sample_patterns(self.source, network, overlaps, uniforms[:, OPTICS_SLOTS])
        answers = ANSWER_CODES[patterns]
        t_v0, t_v1 = prover_arrivals(
            batch.send_v0,
            batch.send_v1,
            geometry,
            settings,
            geometry.prover_position_m + self.displacement_m,
        )
        return ResponseBatch(
            pattern=patterns, answer_v0=answers, answer_v1=answers.copy(), t_v0=t_v0, t_v1=t_v1
        )


# -- running --------------------------------------------------------------

@dataclass(frozen=True)
class ShardTask:
    prover: ProverInterface
    geometry: Geometry
    settings: ProtocolSettings
    master_seed: int
    first_round: int
    count: int
    domain: int = 0


@dataclass(frozen=True, eq=False)
class ShardResult:
    transcript: Transcript
    round_check_passed: np.ndarray
    parity_guesses_correct: Optional[int] = None
    counts: Mapping[Parity, CountsTable] = field(default_factory=dict)


def prepare_rounds(
    first_round: int,
    uniforms: np.ndarray,
    geometry: Geometry,
    settings: ProtocolSettings,
) -> RoundBatch:
    round_index = np.arange(first_round, first_round + len(uniforms), dtype=np.int64)
    basis, parity, first_state = draw_round_codes(
        uniforms[:, PREPARATION_SLOTS], settings.enabled_bases
    )
    send_v0, send_v1 = send_times(round_index, geometry, settings)
    return RoundBatch(round_index, basis, parity, first_state, send_v0, send_v1)


def simulate_shard(task: ShardTask) -> ShardResult:
    uniforms = round_uniforms(task.master_seed, task.first_round, task.count, task.domain)
    batch = prepare_rounds(task.first_round, uniforms, task.geometry, task.settings)
    response = task.prover.respond(batch, uniforms, task.geometry, task.settings)
    passed = round_checks(
        response.answer_v0,
        response.answer_v1,
        response.t_v0,
        response.t_v1,
        batch.send_v0,
        batch.send_v1,
        task.geometry,
        task.settings,
    )
    transcript = Transcript(
        round_index=batch.round_index,
        basis=batch.basis,
        parity=batch.parity,
        first_state=batch.first_state,
        pattern=np.asarray(response.pattern, dtype=np.int16),
        answer_v0=np.asarray(response.answer_v0, dtype=np.int8),
        answer_v1=np.asarray(response.answer_v1, dtype=np.int8),
        t_v0=np.asarray(response.t_v0, dtype=float),
        t_v1=np.asarray(response.t_v1, dtype=float),
    )
    guesses = None
    if response.parity_guess_correct is not None:
        guesses = int(np.count_nonzero(response.parity_guess_correct))
    duration_s = task.count * task.settings.round_period_s
    counts = {
        parity: CountsTable.from_patterns(transcript.pattern[transcript.parity == p], duration_s)
        for p, parity in enumerate(PARITIES)
    }
    return ShardResult(transcript, passed, guesses, counts)


def shard_tasks(
    n: int,
    prover: ProverInterface,
    geometry: Geometry,
    settings: ProtocolSettings,
    master_seed: int,
    shard_rounds: int = DEFAULT_SHARD_ROUNDS,
    domain: int = 0,
) -> List[ShardTask]:
    if n < 1:
        raise PreconditionError("A protocol run needs at least one round")
    if shard_rounds < 1:
        raise ValueError("Shard size must be at least 1")
    return [
        ShardTask(prover, geometry, settings, master_seed, first, min(shard_rounds, n - first), domain)
        for first in range(0, n, shard_rounds)
    ]


Mapper = Callable[[Callable, Sequence], Iterable]


@dataclass(frozen=True, eq=False)
class ProtocolRun:
    transcript: Transcript
    report: VerificationReport
    parity_guesses_correct: Optional[int] = None
    counts: Mapping[Parity, CountsTable] = field(default_factory=dict)


def execute_protocol(
    n: int,
    prover: ProverInterface,
    geometry: Geometry,
    settings: ProtocolSettings,
    master_seed: int,
    mapper: Mapper = map,
    shard_rounds: int = DEFAULT_SHARD_ROUNDS,
    domain: int = 0,
    confidence: float = 0.95,
) -> ProtocolRun:
    """Run n rounds in fixed shards; results do not depend on how shards are mapped"""
    tasks = shard_tasks(n, prover, geometry, settings, master_seed, shard_rounds, domain)
    results = list(mapper(simulate_shard, tasks))
    transcript = Transcript.concatenate([r.transcript for r in results])
    passed = np.concatenate([r.round_check_passed for r in results])
    report = build_report(transcript, passed, confidence)
    guesses = None
    if all(r.parity_guesses_correct is not None for r in results):
        guesses = sum(r.parity_guesses_correct for r in results)
    counts = {
        parity: reduce(CountsTable.merge, (r.counts[parity] for r in results)) for parity in PARITIES
    }
    return ProtocolRun(transcript, report, guesses, counts)


def run_protocol(
    n: int,
    source: SourceParams,
    setup: SetupConfig,
    geometry: Geometry,
    enabled_bases: Iterable[Basis],
    master_seed: int,
    mapper: Mapper = map,
    shard_rounds: int = DEFAULT_SHARD_ROUNDS,
) -> Tuple[Transcript, VerificationReport]:
    """Honest prover at the claimed position for n rounds"""
    settings = replace(setup.protocol, enabled_bases=tuple(enabled_bases))
    run = execute_protocol(
        n, HonestProver(source, setup), geometry, settings, master_seed, mapper, shard_rounds
    )
    return run.transcript, run.report


# -- statistics -----------------------------------------------------------

def answer_counts(transcript: Transcript) -> Dict[Parity, Dict[ProverAnswer, int]]:
    table = np.zeros((len(PARITIES), len(ANSWERS)), dtype=np.int64)
    np.add.at(table, (transcript.parity.astype(np.int64), transcript.answer_v0.astype(np.int64)), 1)
    return {
        parity: {answer: int(table[p, a]) for a, answer in enumerate(ANSWERS)}
        for p, parity in enumerate(PARITIES)
    }


def report_from_counts(
    counts: Mapping[Parity, Mapping[ProverAnswer, int]],
    round_check_failures: int = 0,
    confidence: float = 0.95,
) -> VerificationReport:
    parallel = counts[Parity.PARALLEL]
    orthogonal = counts[Parity.ORTHOGONAL]
    conclusive_parallel = parallel[ProverAnswer.ZERO] + parallel[ProverAnswer.ONE]
    conclusive_orthogonal = orthogonal[ProverAnswer.ZERO] + orthogonal[ProverAnswer.ONE]
    p0_parallel = wilson_interval(parallel[ProverAnswer.ZERO], conclusive_parallel, confidence)
    p1_orthogonal = wilson_interval(orthogonal[ProverAnswer.ONE], conclusive_orthogonal, confidence)
    return VerificationReport(
        counts={parity: dict(counts[parity]) for parity in PARITIES},
        p0_parallel_conclusive=p0_parallel,
        p1_orthogonal_conclusive=p1_orthogonal,
        inconclusive_parallel=wilson_interval(
            parallel[ProverAnswer.INCONCLUSIVE], sum(parallel.values()), confidence
        ),
        inconclusive_orthogonal=wilson_interval(
            orthogonal[ProverAnswer.INCONCLUSIVE], sum(orthogonal.values()), confidence
        ),
        pooled_conclusive_correctness=pooled_estimate(p0_parallel, p1_orthogonal),
        rounds=sum(parallel.values()) + sum(orthogonal.values()),
        round_check_failures=round_check_failures,
        confidence=confidence,
        locc_bound=LOCC_BOUND,
    )


def build_report(
    transcript: Transcript, round_check_passed: np.ndarray, confidence: float = 0.95
) -> VerificationReport:
    failures = int(np.count_nonzero(~np.asarray(round_check_passed, dtype=bool)))
    return report_from_counts(answer_counts(transcript), failures, confidence)


CLAUSE_ROUND_CHECK = "round-check"
CLAUSE_PARALLEL = "parallel-correctness"
CLAUSE_ORTHOGONAL = "orthogonal-correctness"
CLAUSE_INCONCLUSIVE = {
    Parity.PARALLEL: "inconclusive-rate-parallel",
    Parity.ORTHOGONAL: "inconclusive-rate-orthogonal",
}


def verify(report: VerificationReport, policy: VerificationPolicy) -> VerificationResult:
    """Accept only if every clause holds; too little data is indeterminate, not a rejection"""
    conclusive = min(report.conclusive_rounds(p) for p in PARITIES)
    if conclusive < policy.min_conclusive:
        return VerificationResult(
            verdict=Verdict.INDETERMINATE,
            violations=(
                f"too few conclusive rounds per parity: {conclusive} < {policy.min_conclusive}",
            ),
        )

    clauses: Dict[str, bool] = {}
    violations: List[str] = []

    clauses[CLAUSE_ROUND_CHECK] = bool(report.round_checks_passed)
    if not clauses[CLAUSE_ROUND_CHECK]:
        violations.append(
            f"{CLAUSE_ROUND_CHECK}: {report.round_check_failures} rounds failed the round check"
        )

    p0 = report.p0_parallel_conclusive
    clauses[CLAUSE_PARALLEL] = bool(p0.lower > policy.locc_bound)
    if not clauses[CLAUSE_PARALLEL]:
        violations.append(
            f"{CLAUSE_PARALLEL}: lower bound {p0.lower:.4f} of P(0|parallel,concl.) "
            f"does not exceed {policy.locc_bound:.4f}"
        )

    p1 = report.p1_orthogonal_conclusive
    clauses[CLAUSE_ORTHOGONAL] = bool(p1.contains(LOCC_BOUND, policy.perp_margin))
    if not clauses[CLAUSE_ORTHOGONAL]:
        violations.append(
            f"{CLAUSE_ORTHOGONAL}: interval [{p1.lower:.4f}, {p1.upper:.4f}] of "
            f"P(1|orthogonal,concl.) misses {LOCC_BOUND:.4f} by more than {policy.perp_margin}"
        )

    for parity, estimate in (
        (Parity.PARALLEL, report.inconclusive_parallel),
        (Parity.ORTHOGONAL, report.inconclusive_orthogonal),
    ):
        expected = policy.expected_inconclusive[parity]
        name = CLAUSE_INCONCLUSIVE[parity]
        clauses[name] = bool(estimate.contains(expected, policy.inconclusive_margin))
        if not clauses[name]:
            violations.append(
                f"{name}: interval [{estimate.lower:.4f}, {estimate.upper:.4f}] misses "
                f"expected {expected:.4f} by more than {policy.inconclusive_margin}"
            )

    verdict = Verdict.REJECT if violations else Verdict.ACCEPT
    return VerificationResult(verdict=verdict, violations=tuple(violations), clauses=clauses)


# -- expectations ---------------------------------------------------------

def theoretical_distribution(
    parity: Parity, source: Optional[SourceParams] = None, lossless: bool = True
) -> Dict[ProverAnswer, float]:
    """Answer distribution of the ideal source in a lossless balanced setup"""
    if not lossless or (source is not None and (source.g2 != 0.0 or source.indistinguishability != 1.0)):
        raise PreconditionError("The theoretical distribution assumes an ideal source and no loss")
    if parity is Parity.PARALLEL:
        return {ProverAnswer.INCONCLUSIVE: 0.5, ProverAnswer.ZERO: 0.5, ProverAnswer.ONE: 0.0}
    return {
        ProverAnswer.INCONCLUSIVE: 0.25,
        ProverAnswer.ZERO: 0.75 * (1.0 / 3.0),
        ProverAnswer.ONE: 0.75 * (2.0 / 3.0),
    }


def conclusive_conditionals(answers: Mapping[ProverAnswer, float]) -> Tuple[float, float]:
    """(P(0|concl.), P(1|concl.)); zeros when nothing is conclusive"""
    conclusive = answers[ProverAnswer.ZERO] + answers[ProverAnswer.ONE]
    if conclusive == 0:
        return 0.0, 0.0
    return answers[ProverAnswer.ZERO] / conclusive, answers[ProverAnswer.ONE] / conclusive


def answer_distribution(distribution: OutcomeDistribution) -> Dict[ProverAnswer, float]:
    totals = np.zeros(len(ANSWERS))
    np.add.at(totals, ANSWER_CODES.astype(np.int64), distribution.probabilities)
    return {answer: float(totals[a]) for a, answer in enumerate(ANSWERS)}


def model_answer_distribution(
    source: SourceParams,
    setup: SetupConfig,
    parity: Parity,
    enabled_bases: Optional[Iterable[Basis]] = None,
) -> Dict[ProverAnswer, float]:
    """Exact honest answer distribution for one parity, averaged over bases and state assignment"""
    bases = tuple(enabled_bases or setup.protocol.enabled_bases)
    totals = {answer: 0.0 for answer in ANSWERS}
    for basis in bases:
        for first_state in (0, 1):
            round = RoundSpec.build(basis, parity, first_state)
            answers = answer_distribution(exact_outcome_distribution(source, setup, round))
            for answer, p in answers.items():
                totals[answer] += p / (2 * len(bases))
    return totals


def parallel_conclusive_correctness(source: SourceParams, network: OpticalNetwork) -> float:
    """P(0|parallel, concl.) straight from the exact engine"""
    distribution = distribution_for_overlap(source, network, source.interfering_overlap)
    return conclusive_conditionals(answer_distribution(distribution))[0]


def policy_from_model(
    source: SourceParams,
    setup: SetupConfig,
    enabled_bases: Optional[Iterable[Basis]] = None,
    **overrides,
) -> VerificationPolicy:
    """Inconclusive-rate bands centred on the exact honest model of this setup"""
    expected = {
        parity: model_answer_distribution(source, setup, parity, enabled_bases)[ProverAnswer.INCONCLUSIVE]
        for parity in PARITIES
    }
    return VerificationPolicy(expected_inconclusive=expected, **overrides)


def expected_report(
    source: SourceParams,
    setup: SetupConfig,
    rounds: int,
    enabled_bases: Optional[Iterable[Basis]] = None,
    confidence: float = 0.95,
) -> VerificationReport:
    """Report whose counts are the rounded expectations of an honest run"""
    per_parity = rounds // 2
    counts = {}
    for parity in PARITIES:
        answers = model_answer_distribution(source, setup, parity, enabled_bases)
        counts[parity] = {answer: int(round(p * per_parity)) for answer, p in answers.items()}
    return report_from_counts(counts, confidence=confidence)


SOURCE_PARAMETER_RANGES = (
    ("g2", "g2_uncertainty", (0.0, 0.5)),
    ("indistinguishability", "indistinguishability_uncertainty", (0.0, 1.0)),
)


def propagate_source_uncertainty(
    evaluate: Callable[[SourceParams], Mapping[str, float]], source: SourceParams
) -> Dict[str, float]:
    """First-order uncertainty of each evaluated quantity from the g2 and M standard errors.

    Each parameter is shifted one standard error either way, clipped to its
    range (one-sided at an edge). Secant slopes times the errors add in quadrature.
    """
    central = evaluate(source)
    variance = {key: 0.0 for key in central}
    for name, uncertainty_name, (low, high) in SOURCE_PARAMETER_RANGES:
        sigma = getattr(source, uncertainty_name)
        x = getattr(source, name)
        below, above = max(low, x - sigma), min(high, x + sigma)
        if sigma == 0.0 or above <= below:
            continue
        at_below = evaluate(replace(source, **{name: below}))
        at_above = evaluate(replace(source, **{name: above}))
        for key in central:
            slope = (at_above[key] - at_below[key]) / (above - below)
            variance[key] += (slope * sigma) ** 2
    return {key: math.sqrt(v) for key, v in variance.items()}
