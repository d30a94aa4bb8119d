from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..dtos import (
    AttackReportDTO,
    AttackRequestDTO,
    ConfigSummaryDTO,
    CountsAnalysisDTO,
    EstimationResultDTO,
    ProbabilityRowDTO,
    SimulateRequestDTO,
    SimulationSummaryDTO,
    SweepRequestDTO,
    VerificationReportDTO,
)
from ...domain import (
    Arm,
    AttackReport,
    Basis,
    CountsRepositoryInterface,
    CountsTable,
    HomMeasurement,
    OutcomeDistribution,
    Parity,
    ProverAnswer,
    ReportRepositoryInterface,
    RoundSpec,
    SetupConfig,
    SetupRepositoryInterface,
    SourceParams,
    SweepCell,
    SweepRepositoryInterface,
    SweepResult,
    SweepSpec,
    TranscriptRepositoryInterface,
    UncertainValue,
    VerificationPolicy,
)
from ...domain.adversary import evaluate_attack, get_strategy
from ...domain.characterization import simulate_hbt_g2, simulate_hom_measurement
from ...domain.entities import BASES, DETECTORS, NO_PATTERN, PARITIES, PATTERN_COUNT, Transcript
from ...domain.optics import OpticalNetwork, empirical_distribution, exact_outcome_distribution
from ...domain.protocol import (
    DEFAULT_SHARD_ROUNDS,
    LOCC_BOUND,
    HonestProver,
    conclusive_conditionals,
    execute_protocol,
    expected_report,
    model_answer_distribution,
    parallel_conclusive_correctness,
    policy_from_model,
    propagate_source_uncertainty,
    theoretical_distribution,
    verify,
)
from ...domain.setup import conditional_answers, normalized_coincidences, path_survival
from ...domain.source import hom_visibility, indistinguishability_from_visibility
from ...infrastructure.execution import ShardExecutor
from ...infrastructure.logger import get_logger


logger = get_logger(__name__)


def _enabled_bases(setup: SetupConfig, count: Optional[int]) -> Tuple[Basis, ...]:
    if count is None:
        return setup.protocol.enabled_bases
    return BASES[:count]


def _conditional_rows(answers: Dict[Parity, Dict[ProverAnswer, float]]) -> Dict[str, float]:
    """Inconclusive rate and conclusive-conditioned answers per parity"""
    rows = {}
    for parity in (Parity.ORTHOGONAL, Parity.PARALLEL):
        p0, p1 = conclusive_conditionals(answers[parity])
        rows[f"P(inc|{parity.value})"] = answers[parity][ProverAnswer.INCONCLUSIVE]
        rows[f"P(0|{parity.value},concl.)"] = p0
        rows[f"P(1|{parity.value},concl.)"] = p1
    return rows


def model_distribution(
    source: SourceParams, setup: SetupConfig, parity: Parity, enabled_bases: Sequence[Basis]
) -> OutcomeDistribution:
    """Click-pattern distribution of one parity averaged over bases and state assignment"""
    total = np.zeros(PATTERN_COUNT)
    for basis in enabled_bases:
        for first_state in (0, 1):
            round = RoundSpec.build(basis, parity, first_state)
            total += exact_outcome_distribution(source, setup, round).probabilities
    return OutcomeDistribution(total / (2 * len(enabled_bases)))


def _pattern_distance(
    transcript: Transcript, source: SourceParams, setup: SetupConfig, enabled_bases: Sequence[Basis]
) -> Dict[str, float]:
    """Total-variation distance between sampled and exact click patterns, per parity with rounds"""
    distances = {}
    for i, parity in enumerate(PARITIES):
        masks = transcript.pattern[transcript.parity == i]
        if not np.any(masks != NO_PATTERN):
            continue
        sampled = empirical_distribution(masks)
        distances[parity.value] = sampled.total_variation(
            model_distribution(source, setup, parity, enabled_bases)
        )
    return distances


class ProtocolUseCase:
    """Use case for honest protocol runs"""

    def __init__(
        self,
        setup_repo: SetupRepositoryInterface,
        transcript_repo: TranscriptRepositoryInterface,
        counts_repo: CountsRepositoryInterface,
        report_repo: ReportRepositoryInterface,
        shard_rounds: int = DEFAULT_SHARD_ROUNDS,
    ):
        self._setup_repo = setup_repo
        self._transcript_repo = transcript_repo
        self._counts_repo = counts_repo
        self._report_repo = report_repo
        self._shard_rounds = shard_rounds

    def simulate(self, dto: SimulateRequestDTO) -> SimulationSummaryDTO:
        """Run (or evaluate exactly) the honest protocol and write the artifacts"""
        setup = self._setup_repo.get(dto.config)
        source = SourceParams.ideal() if dto.ideal_source else setup.source
        bases = _enabled_bases(setup, dto.bases)
        policy = policy_from_model(source, setup, bases)

        theory = _conditional_rows({p: theoretical_distribution(p) for p in PARITIES})

        def model_rows(params: SourceParams) -> Dict[str, float]:
            return _conditional_rows(
                {p: model_answer_distribution(params, setup, p, bases) for p in PARITIES}
            )

        model = model_rows(source)
        model_uncertainty = None
        if source.has_uncertainty:
            model_uncertainty = propagate_source_uncertainty(model_rows, source)

        output = Path(dto.output_dir) if dto.output_dir else None
        written: List[str] = []
        simulated = None
        pattern_distance = None
        if dto.exact:
            logger.info("Exact evaluation of %s for %d rounds", setup.name, dto.n)
            report = expected_report(source, setup, dto.n, bases)
            counts = {
                p: CountsTable.from_distribution(model_distribution(source, setup, p, bases), dto.n // 2)
                for p in PARITIES
            }
        else:
            executor = ShardExecutor(dto.workers)
            logger.info(
                "Simulating %d rounds of %s with seed %d on %d workers",
                dto.n, setup.name, dto.seed, dto.workers,
            )
            settings = replace(setup.protocol, enabled_bases=bases)
            run = execute_protocol(
                dto.n,
                HonestProver(source, setup),
                setup.geometry,
                settings,
                dto.seed,
                executor.map,
                self._shard_rounds,
            )
            report = run.report
            simulated = _conditional_rows({p: report.conditional_probabilities(p) for p in PARITIES})
            counts = run.counts
            pattern_distance = _pattern_distance(run.transcript, source, setup, bases)
            if output:
                self._transcript_repo.save(run.transcript, output / "transcript.csv")
                written.append(str(output / "transcript.csv"))

        result = verify(report, policy)
        logger.info("Verifier verdict: %s", result.verdict.value)
        report_dto = VerificationReportDTO.from_entity(report, result)
        summary = SimulationSummaryDTO(
            config=setup.name,
            rounds=dto.n,
            seed=dto.seed,
            exact=dto.exact,
            pattern_total_variation=pattern_distance,
            rows=[
                ProbabilityRowDTO(
                    quantity=name,
                    theory=theory[name],
                    model=model[name],
                    model_uncertainty=model_uncertainty[name] if model_uncertainty else None,
                    simulated=simulated[name] if simulated else None,
                )
                for name in theory
            ],
            report=report_dto,
        )

        if output:
            for parity, table in counts.items():
                coincidences = output / f"coincidences_{parity.value}.csv"
                singles = output / f"singles_{parity.value}.csv"
                self._counts_repo.save(table, coincidences, singles)
                written.extend([str(coincidences), str(singles)])
            self._report_repo.save(summary.model_dump(mode="json"), output / "report.json")
            written.append(str(output / "report.json"))
            summary = summary.model_copy(update={"written": written})
        return summary


@dataclass(frozen=True)
class SweepCellTask:
    index: int
    source: SourceParams
    setup: SetupConfig
    rounds: Optional[int] = None
    master_seed: Optional[int] = None


def evaluate_cell(task: SweepCellTask) -> float:
    """P(0|parallel, concl.) of one grid cell, exact or sampled on its own stream domain"""
    if task.rounds is None:
        return parallel_conclusive_correctness(task.source, OpticalNetwork.from_setup(task.setup))
    run = execute_protocol(
        task.rounds,
        HonestProver(task.source, task.setup),
        task.setup.geometry,
        task.setup.protocol,
        task.master_seed,
        domain=task.index + 1,
    )
    return run.report.p0_parallel_conclusive.value


def threshold_crossing(
    indistinguishabilities: Sequence[float], values: Sequence[float], bound: float = LOCC_BOUND
) -> Optional[float]:
    """Smallest M at which the row reaches the bound, linearly interpolated"""
    if values[0] >= bound:
        return float(indistinguishabilities[0])
    for j in range(1, len(values)):
        if values[j - 1] < bound <= values[j]:
            m0, m1 = indistinguishabilities[j - 1], indistinguishabilities[j]
            v0, v1 = values[j - 1], values[j]
            return float(m0 + (bound - v0) * (m1 - m0) / (v1 - v0))
    return None


class SweepUseCase:
    """Use case for purity/indistinguishability sweeps"""

    def __init__(self, setup_repo: SetupRepositoryInterface, sweep_repo: SweepRepositoryInterface):
        self._setup_repo = setup_repo
        self._sweep_repo = sweep_repo

    def run(self, dto: SweepRequestDTO) -> SweepResult:
        spec = SweepSpec(
            purity_min=dto.purity_min,
            purity_max=dto.purity_max,
            purity_steps=dto.steps,
            indistinguishability_min=dto.indistinguishability_min,
            indistinguishability_max=dto.indistinguishability_max,
            indistinguishability_steps=dto.steps,
            rounds_per_cell=dto.rounds_per_cell,
            master_seed=dto.seed,
        )
        setup = self._setup_repo.get(dto.config)
        result = self.sweep(spec, setup, ShardExecutor(dto.workers))
        grid = Path(dto.output)
        contour = grid.with_name(f"{grid.stem}_contour.csv")
        self._sweep_repo.save(result, grid, contour)
        return result

    def sweep(self, spec: SweepSpec, setup: SetupConfig, executor: Optional[ShardExecutor] = None) -> SweepResult:
        executor = executor or ShardExecutor()
        purities = spec.purities()
        overlaps = spec.indistinguishabilities()
        convention = setup.source.overlap_convention
        tasks = [
            SweepCellTask(
                index=i * len(overlaps) + j,
                source=SourceParams.from_purity(float(p), float(m), convention),
                setup=setup,
                rounds=spec.rounds_per_cell,
                master_seed=spec.master_seed,
            )
            for i, p in enumerate(purities)
            for j, m in enumerate(overlaps)
        ]
        logger.info(
            "Sweeping %dx%d cells (%s) on %d workers",
            len(purities), len(overlaps), "exact" if spec.exact else "Monte Carlo", executor.workers,
        )
        values = np.array(executor.map(evaluate_cell, tasks)).reshape(len(purities), len(overlaps))
        cells = tuple(
            SweepCell(float(p), float(m), float(values[i, j]))
            for i, p in enumerate(purities)
            for j, m in enumerate(overlaps)
        )
        thresholds = tuple(
            (float(p), threshold_crossing(overlaps, values[i])) for i, p in enumerate(purities)
        )
        return SweepResult(spec=spec, cells=cells, thresholds=thresholds)


class EstimationUseCase:
    """Use case for the HOM visibility to indistinguishability estimator chain"""

    def estimate(
        self,
        g2_parallel: UncertainValue,
        g2_perp: UncertainValue,
        g2: UncertainValue,
    ) -> EstimationResultDTO:
        visibility = hom_visibility(HomMeasurement(g2_parallel, g2_perp))
        indistinguishability = indistinguishability_from_visibility(visibility, g2)
        return EstimationResultDTO(
            visibility=visibility.value,
            visibility_uncertainty=visibility.uncertainty,
            indistinguishability=indistinguishability.value,
            indistinguishability_uncertainty=indistinguishability.uncertainty,
            g2_parallel=g2_parallel.value,
            g2_perp=g2_perp.value,
            g2_hbt=g2.value,
        )

    def characterize(self, source: SourceParams, efficiency: float) -> EstimationResultDTO:
        """Simulate the HOM and HBT experiments for a source, then run the estimator chain"""
        logger.info("Simulating HOM and HBT measurements at efficiency %g", efficiency)
        measurement = simulate_hom_measurement(source, efficiency)
        return self.estimate(
            measurement.g2_parallel,
            measurement.g2_perp,
            UncertainValue(simulate_hbt_g2(source, efficiency)),
        )


class AttackUseCase:
    """Use case for evaluating LOCC attacker strategies"""

    def __init__(
        self,
        setup_repo: SetupRepositoryInterface,
        report_repo: ReportRepositoryInterface,
        shard_rounds: int = DEFAULT_SHARD_ROUNDS,
    ):
        self._setup_repo = setup_repo
        self._report_repo = report_repo
        self._shard_rounds = shard_rounds

    def attack(self, dto: AttackRequestDTO) -> AttackReport:
        strategy = get_strategy(dto.strategy)
        setup = self._setup_repo.get(dto.config)
        bases = BASES[: dto.bases]
        executor = ShardExecutor(dto.workers)
        logger.info(
            "Attacking with '%s' over %d bases for %d rounds, seed %d",
            strategy.name, len(bases), dto.n, dto.seed,
        )
        report = evaluate_attack(
            strategy,
            dto.n,
            setup,
            bases,
            dto.seed,
            policy=VerificationPolicy.ideal(),
            mapper=executor.map,
            shard_rounds=self._shard_rounds,
        )
        if dto.output:
            self._report_repo.save(AttackReportDTO.from_entity(report).model_dump(mode="json"), Path(dto.output))
        return report


class CountsUseCase:
    """Use case for analysing coincidence and singles counts"""

    def __init__(self, counts_repo: CountsRepositoryInterface):
        self._counts_repo = counts_repo

    def analyze(self, coincidences: str, singles: Optional[str] = None) -> CountsAnalysisDTO:
        counts = self._counts_repo.load(coincidences, singles)
        return CountsAnalysisDTO(
            coincidences=dict(counts.coincidences),
            conditional_answers=conditional_answers(counts),
            normalized_coincidences=normalized_coincidences(counts) if singles else None,
        )


class ConfigUseCase:
    """Use case for loading and validating setup documents"""

    def __init__(self, setup_repo: SetupRepositoryInterface):
        self._setup_repo = setup_repo

    def load_config(self, text: str) -> SetupConfig:
        return self._setup_repo.parse(text)

    def validate(self, name_or_path: str) -> ConfigSummaryDTO:
        config = self._setup_repo.get(name_or_path)
        return ConfigSummaryDTO(
            name=config.name,
            arm_transmission={arm.value: config.arm_transmission(arm) for arm in Arm},
            split_ratios={name: bs.split_ratio_upper for name, bs in config.beamsplitters.items()},
            path_survival={
                f"{arm.value}->{detector.name}": path_survival(config, arm, detector)
                for arm in Arm
                for detector in DETECTORS
            },
            source={
                "g2": config.source.g2,
                "indistinguishability": config.source.indistinguishability,
                "p2": config.source.p2,
            },
            enabled_bases=[b.value for b in config.protocol.enabled_bases],
        )

    def canonical(self, name_or_path: str) -> str:
        return self._setup_repo.serialize(self._setup_repo.get(name_or_path))
