import pytest
import numpy as np
from src.domain.entities import (
    ArmTransmission,
    AttackerStrategy,
    BasisPolicy,
    BeamSplitterSpec,
    ClickPattern,
    CountsTable,
    Detector,
    Geometry,
    OutcomeDistribution,
    Parity,
    PolarizationQubit,
    ProtocolSettings,
    ResponseRule,
    RoundSpec,
    SetupConfig,
    SourceParams,
    SpaceTimePoint,
    SweepSpec,
    Basis,
    Arm,
    two_photon_probability,
)
from src.domain.errors import (
    ConfigError,
    DomainError,
    PreconditionError,
    UnsupportedRegimeError,
)


class TestPolarizationQubit:
    """Test PolarizationQubit entity"""

    def test_labelled_states_are_normalized(self):
        """Test that every labelled state is a valid qubit"""
        for label in "HVDARL":
            qubit = PolarizationQubit.from_label(label)
            assert abs(qubit.h) ** 2 + abs(qubit.v) ** 2 == pytest.approx(1.0)

    def test_non_normalized_raises_error(self):
        """Test that a non-normalized state is a precondition violation"""
        with pytest.raises(PreconditionError, match="not normalized"):
            PolarizationQubit(1.0, 1.0)

    def test_unknown_label_raises_error(self):
        """Test that an unknown label raises ValueError"""
        with pytest.raises(ValueError, match="Unknown polarization label"):
            PolarizationQubit.from_label("X")


class TestClickPattern:
    """Test ClickPattern entity"""

    def test_from_labels(self):
        """Test pattern construction from detector labels"""
        pattern = ClickPattern.from_labels("CA")

        assert pattern.mask == 5
        assert pattern.detectors == (Detector.A, Detector.C)
        assert pattern.labels == "AC"
        assert Detector.C in pattern

    def test_empty_pattern(self):
        """Test that no clicks is the vacuum pattern"""
        assert ClickPattern.from_labels("").mask == 0
        assert ClickPattern(0).labels == "-"
        assert ClickPattern(0).cardinality == 0

    def test_mask_out_of_range_raises_error(self):
        """Test that masks beyond four detectors raise ValueError"""
        with pytest.raises(ValueError, match="Click mask"):
            ClickPattern(16)

    def test_unknown_detector_raises_error(self):
        """Test that an unknown detector label raises ValueError"""
        with pytest.raises(ValueError, match="Unknown detector"):
            ClickPattern.from_labels("AE")


class TestOutcomeDistribution:
    """Test OutcomeDistribution entity"""

    def test_probability_lookup(self):
        """Test lookup by pattern and marginal click probabilities"""
        probabilities = np.zeros(16)
        probabilities[ClickPattern.from_labels("AB").mask] = 0.5
        probabilities[ClickPattern.from_labels("C").mask] = 0.5
        distribution = OutcomeDistribution(probabilities)

        assert distribution.probability("AB") == 0.5
        assert distribution.click_probability(Detector.A) == 0.5
        assert distribution.coincidence_probability(Detector.A, Detector.B) == 0.5
        assert distribution.coincidence_probability(Detector.A, Detector.C) == 0.0

    def test_unnormalized_raises_error(self):
        """Test that probabilities not summing to one raise DomainError"""
        with pytest.raises(DomainError, match="sum to"):
            OutcomeDistribution(np.full(16, 0.1))

    def test_negative_raises_error(self):
        """Test that negative probabilities raise DomainError"""
        probabilities = np.zeros(16)
        probabilities[0], probabilities[1] = 1.5, -0.5
        with pytest.raises(DomainError, match="nonnegative"):
            OutcomeDistribution(probabilities)


class TestSourceParams:
    """Test SourceParams entity"""

    def test_two_photon_probability_roots(self):
        """Test the two-photon probability solving g2 = 2 p2 / (1 + p2)^2"""
        assert two_photon_probability(0.224) == pytest.approx(0.14748, abs=1e-4)
        assert two_photon_probability(0.021) == pytest.approx(0.0107265, rel=1e-4)
        assert two_photon_probability(0.0) == 0.0

    def test_two_photon_probability_residual(self):
        """Test the solver residual over the supported range"""
        for g2 in np.linspace(0.0, 0.5, 11):
            p2 = two_photon_probability(float(g2))
            assert 2 * p2 / (1 + p2) ** 2 == pytest.approx(g2, abs=1e-10)

    def test_g2_above_half_unsupported(self):
        """Test that g2 above 1/2 is outside the two-photon model"""
        source = SourceParams(g2=0.6, indistinguishability=0.5)
        with pytest.raises(UnsupportedRegimeError):
            source.p2

    def test_effective_overlap_convention(self):
        """Test that the effective convention interferes with the HOM visibility"""
        source = SourceParams(g2=0.224, indistinguishability=0.542, overlap_convention="effective")

        assert source.interfering_overlap == pytest.approx(0.374, abs=1e-3)
        assert SourceParams(g2=0.224, indistinguishability=0.542).interfering_overlap == 0.542

    def test_from_purity(self):
        """Test construction from purity"""
        source = SourceParams.from_purity(0.979, 0.96)

        assert source.g2 == pytest.approx(0.021)
        assert source.purity == pytest.approx(0.979)

    def test_indistinguishability_out_of_range_raises_error(self):
        """Test that M outside [0, 1] raises DomainError"""
        with pytest.raises(DomainError, match="Indistinguishability"):
            SourceParams(g2=0.0, indistinguishability=1.2)

    def test_unknown_convention_raises_error(self):
        """Test that an unknown overlap convention raises ValueError"""
        with pytest.raises(ValueError, match="Overlap convention"):
            SourceParams(g2=0.0, indistinguishability=1.0, overlap_convention="other")


class TestOpticalComponents:
    """Test beam splitter, arm and setup entities"""

    def test_arm_transmission_total(self):
        """Test that the arm transmission composes its components"""
        arm = ArmTransmission(switch=0.712, delay_stage=0.954, polarization_modulator=0.814, fiber=0.862)

        assert arm.total == pytest.approx(0.477, abs=1e-3)

    def test_split_ratio_bounds(self):
        """Test that split ratios must lie strictly inside (0, 1)"""
        assert BeamSplitterSpec(0.545).split_ratio_lower == pytest.approx(0.455)
        with pytest.raises(DomainError, match="Split ratio"):
            BeamSplitterSpec(1.0)

    def test_transmission_above_one_raises_error(self):
        """Test that a transmission of 1.2 is out of range"""
        with pytest.raises(DomainError, match="switch"):
            ArmTransmission(switch=1.2, delay_stage=1.0, polarization_modulator=1.0, fiber=1.0)

    def test_lossless_balanced_setup(self):
        """Test the lossless balanced reference setup"""
        setup = SetupConfig.lossless_balanced()

        assert setup.arm_transmission(Arm.V0) == 1.0
        assert setup.detector_spec(Detector.D).efficiency == 1.0
        assert setup.downstream_splitter(Detector.C) is setup.beamsplitters["BS3"]

    def test_geometry_requires_ordering(self):
        """Test that the prover must sit between the verifiers"""
        with pytest.raises(ValueError, match="V0 < P < V1"):
            Geometry(0.0, 300.0, 200.0)

    def test_geometry_time_of_flight(self):
        """Test time of flight to the claimed position"""
        geometry = Geometry(0.0, 100.0, 300.0)

        assert geometry.time_of_flight(Arm.V0) == pytest.approx(5e-7)
        assert geometry.time_of_flight(Arm.V1) == pytest.approx(1e-6)

    def test_protocol_settings_need_bases(self):
        """Test that an empty basis set is a config error"""
        with pytest.raises(ConfigError, match="enabled_bases"):
            ProtocolSettings(enabled_bases=())


class TestSpaceTimePoint:
    """Test SpaceTimePoint light-cone checks"""

    def test_signal_reaches_event_inside_light_cone(self):
        """Test an event later than the light travel time is reachable"""
        origin = SpaceTimePoint(0.0, 0.0)

        assert origin.can_signal(SpaceTimePoint(300.0, 2e-6), 3e8)
        assert origin.can_signal(SpaceTimePoint(-300.0, 1.5e-6), 3e8)

    def test_signal_misses_event_outside_light_cone(self):
        """Test an event earlier than the light travel time is out of reach"""
        origin = SpaceTimePoint(0.0, 0.0)

        assert not origin.can_signal(SpaceTimePoint(300.0, 0.5e-6), 3e8)
        assert not SpaceTimePoint(0.0, 1e-6).can_signal(origin, 3e8)

    def test_tolerance_widens_light_cone(self):
        """Test the timing tolerance admits a slightly late arrival"""
        origin = SpaceTimePoint(0.0, 0.0)
        target = SpaceTimePoint(300.0, 0.9995e-6)

        assert not origin.can_signal(target, 3e8)
        assert origin.can_signal(target, 3e8, tolerance_s=1e-9)

    def test_returns_plain_boolean(self):
        """Test that the check is a python bool"""
        assert type(SpaceTimePoint(0.0, 0.0).can_signal(SpaceTimePoint(1.0, 1.0), 3e8)) is bool


class TestRoundSpec:
    """Test RoundSpec entity"""

    def test_parity_sets_polarization_overlap(self):
        """Test that parallel rounds share a state and orthogonal rounds do not"""
        for basis in Basis:
            assert RoundSpec.build(basis, Parity.PARALLEL, 1).polarization_overlap == pytest.approx(1.0)
            assert RoundSpec.build(basis, Parity.ORTHOGONAL, 0).polarization_overlap == pytest.approx(0.0)

    def test_mismatched_parity_raises_error(self):
        """Test that qubits contradicting the parity raise ValueError"""
        with pytest.raises(ValueError, match="parallel round"):
            RoundSpec(
                basis=Basis.HV,
                parity=Parity.PARALLEL,
                qubit_0=PolarizationQubit.from_label("H"),
                qubit_1=PolarizationQubit.from_label("V"),
            )


class TestCountsTable:
    """Test CountsTable entity"""

    def test_pairs_are_canonicalized(self):
        """Test that pair labels are order-insensitive"""
        counts = CountsTable(coincidences={"BA": 3, "dc": 2}, singles={"a": 7})

        assert counts.coincidences["AB"] == 3
        assert counts.coincidence(Detector.D, Detector.C) == 2
        assert counts.singles == {"A": 7, "B": 0, "C": 0, "D": 0}

    def test_unknown_pair_raises_error(self):
        """Test that an unknown pair raises ValueError"""
        with pytest.raises(ValueError, match="Unknown detector pair"):
            CountsTable(coincidences={"AE": 1}, singles={})

    def test_negative_count_raises_error(self):
        """Test that counts must be nonnegative integers"""
        with pytest.raises(ValueError, match="nonnegative integer"):
            CountsTable(coincidences={"AB": -1}, singles={})

    def test_from_patterns_counts_every_contained_pair(self):
        """Test that a three-fold click adds to all three of its pairs"""
        patterns = [ClickPattern.from_labels("ABC"), ClickPattern.from_labels("A"), -1]
        counts = CountsTable.from_patterns(patterns)

        assert counts.coincidences == {"AB": 1, "AC": 1, "AD": 0, "BC": 1, "BD": 0, "CD": 0}
        assert counts.singles == {"A": 2, "B": 1, "C": 1, "D": 0}

    def test_merge(self):
        """Test merging two tables adds counts"""
        first = CountsTable(coincidences={"AB": 1}, singles={"A": 1}, duration_s=1.0)
        second = CountsTable(coincidences={"AB": 2}, singles={"A": 3}, duration_s=2.0)
        merged = first.merge(second)

        assert merged.coincidences["AB"] == 3
        assert merged.singles["A"] == 4
        assert merged.duration_s == 3.0


class TestAttackerStrategy:
    """Test AttackerStrategy entity"""

    def test_fixed_policy_needs_basis(self):
        """Test that a fixed basis policy needs its basis"""
        with pytest.raises(ValueError, match="Fixed basis policy"):
            AttackerStrategy("fixed", BasisPolicy.FIXED, ResponseRule.DIRECT)

    def test_claim_loss_needs_basis_knowledge(self):
        """Test that claim-loss rules must learn the round basis"""
        with pytest.raises(ValueError, match="needs to learn the round basis"):
            AttackerStrategy("loss", BasisPolicy.SHARED_UNIFORM, ResponseRule.CLAIM_LOSS)

    def test_single_classical_exchange(self):
        """Test that adversaries exchange exactly one message"""
        with pytest.raises(ValueError, match="one classical message"):
            AttackerStrategy(
                "chatty", BasisPolicy.SHARED_UNIFORM, ResponseRule.DIRECT, classical_exchanges=2
            )


class TestSweepSpec:
    """Test SweepSpec entity"""

    def test_grid_axes(self):
        """Test the grid axes include both ends"""
        spec = SweepSpec(0.5, 1.0, 6, 0.0, 1.0, 3)

        assert spec.exact
        assert spec.purities().tolist() == pytest.approx([0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
        assert spec.indistinguishabilities().tolist() == pytest.approx([0.0, 0.5, 1.0])

    def test_low_purity_unsupported(self):
        """Test that purity below 1/2 is outside the supported regime"""
        with pytest.raises(UnsupportedRegimeError):
            SweepSpec(0.4, 1.0, 5, 0.0, 1.0, 5)

    def test_too_few_steps_raises_error(self):
        """Test that an axis needs at least two steps"""
        with pytest.raises(ValueError, match="at least 2 steps"):
            SweepSpec(0.5, 1.0, 1, 0.0, 1.0, 5)

    def test_monte_carlo_needs_seed(self):
        """Test that sampled sweeps need a master seed"""
        with pytest.raises(ValueError, match="master seed"):
            SweepSpec(0.5, 1.0, 2, 0.0, 1.0, 2, rounds_per_cell=100)
