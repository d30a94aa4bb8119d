from dataclasses import replace
from itertools import product

import pytest
import numpy as np
from src.domain.entities import (
    Basis,
    ClickPattern,
    Detector,
    Parity,
    PolarizationQubit,
    RoundSpec,
    SetupConfig,
    SourceParams,
)
from src.domain.errors import DomainError, PreconditionError
from src.domain.optics import (
    OpticalNetwork,
    VACUUM,
    distribution_for_overlap,
    empirical_distribution,
    exact_outcome_distribution,
    or_convolve,
    polarization_overlap,
    sample_outcome,
    sample_patterns,
    two_photon_bs_distribution,
)
from src.domain.protocol import answer_distribution, conclusive_conditionals, overlap_table
from src.domain.randomness import OPTICS_SLOTS, RoundStream, round_uniforms
from src.infrastructure.config import JsonSetupRepository


class TestPolarizationOverlap:
    """Test polarization overlap"""

    def test_overlaps(self):
        """Test identical, orthogonal and unbiased states"""
        h = PolarizationQubit.from_label("H")

        assert polarization_overlap(h, h) == pytest.approx(1.0)
        assert polarization_overlap(h, PolarizationQubit.from_label("V")) == pytest.approx(0.0)
        assert polarization_overlap(h, PolarizationQubit.from_label("D")) == pytest.approx(0.5)

    def test_non_normalized_raises_error(self):
        """Test that a tampered qubit is rejected"""
        h = PolarizationQubit.from_label("H")
        broken = PolarizationQubit.from_label("V")
        object.__setattr__(broken, "h", 1.0)

        with pytest.raises(PreconditionError):
            polarization_overlap(h, broken)


class TestTwoPhotonBeamSplitter:
    """Test the two-photon beam splitter rule"""

    def test_perfect_bunching(self):
        """Test HOM bunching of indistinguishable photons"""
        assert two_photon_bs_distribution(0.5, 1.0) == pytest.approx((0.5, 0.5, 0.0))

    def test_distinguishable_photons(self):
        """Test classical statistics without overlap"""
        assert two_photon_bs_distribution(0.5, 0.0) == pytest.approx((0.25, 0.25, 0.5))

    def test_unbalanced_partial_overlap(self):
        """Test BS1 split with the measured indistinguishability"""
        both_upper, both_lower, split = two_photon_bs_distribution(0.545, 0.542)

        assert both_upper == pytest.approx(0.382377, abs=1e-5)
        assert both_lower == pytest.approx(0.382377, abs=1e-5)
        assert split == pytest.approx(0.235246, abs=1e-5)
        assert both_upper + both_lower + split == pytest.approx(1.0)

    def test_split_ratio_out_of_range(self):
        """Test that T outside (0, 1) raises DomainError"""
        with pytest.raises(DomainError, match="Split ratio"):
            two_photon_bs_distribution(1.0, 0.5)


class TestExactEngine:
    """Test the exact outcome distribution"""

    @pytest.fixture
    def lossless(self):
        return SetupConfig.lossless_balanced()

    def test_or_convolve_with_vacuum_is_identity(self):
        """Test that vacuum is the neutral element of OR-convolution"""
        vector = np.linspace(1.0, 16.0, 16)
        vector /= vector.sum()

        assert or_convolve(VACUUM, vector) == pytest.approx(vector)

    def test_ideal_parallel_round(self, lossless):
        """Test perfect bunching leaves only AB, CD and single clicks"""
        round = RoundSpec.build(Basis.HV, Parity.PARALLEL)
        distribution = exact_outcome_distribution(SourceParams.ideal(), lossless, round)

        expected = {"AB": 0.25, "CD": 0.25, "A": 0.125, "B": 0.125, "C": 0.125, "D": 0.125}
        for labels, probability in distribution.as_dict().items():
            assert probability == pytest.approx(expected.get(labels, 0.0), abs=1e-10)

    def test_ideal_orthogonal_round(self, lossless):
        """Test that all six coincidences are equally likely for orthogonal qubits"""
        round = RoundSpec.build(Basis.DA, Parity.ORTHOGONAL)
        distribution = exact_outcome_distribution(SourceParams.ideal(), lossless, round)

        singles = sum(distribution.probability(ClickPattern.from_labels(d)) for d in "ABCD")
        assert singles + distribution.probability("-") == pytest.approx(0.25, abs=1e-10)
        for pair in ("AB", "AC", "AD", "BC", "BD", "CD"):
            assert distribution.probability(pair) == pytest.approx(0.125, abs=1e-10)

    def test_loss_tolerance_of_conditionals(self):
        """Test conditional answers are unchanged by equal path losses"""
        source = SourceParams.ideal()
        for efficiency in np.linspace(0.05, 1.0, 12):
            for arm_survival in ((1.0, 1.0), (0.3, 0.8)):
                port = float(efficiency) / 2.0
                network = OpticalNetwork(arm_survival, 0.5, (port, port), (port, port))
                parallel = answer_distribution(distribution_for_overlap(source, network, 1.0))
                orthogonal = answer_distribution(distribution_for_overlap(source, network, 0.0))

                assert conclusive_conditionals(parallel)[0] == pytest.approx(1.0, abs=1e-9)
                assert conclusive_conditionals(orthogonal)[0] == pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_cross_coincidences_need_perfect_interference(self, lossless):
        """Test that imperfect sources leak into cross coincidences"""
        round = RoundSpec.build(Basis.HV, Parity.PARALLEL)
        for source in (SourceParams(0.0, 0.9), SourceParams(0.05, 1.0)):
            distribution = exact_outcome_distribution(source, lossless, round)
            assert distribution.probability("AC") > 0.0

    def test_dark_clicks(self):
        """Test dark clicks appear even without photons reaching the detectors"""
        network = OpticalNetwork((0.0, 0.0), 0.5, (0.5, 0.5), (0.5, 0.5), (0.1, 0.0, 0.0, 0.0))
        distribution = distribution_for_overlap(SourceParams.ideal(), network, 1.0)

        assert distribution.probability("A") == pytest.approx(0.1)
        assert distribution.probability("-") == pytest.approx(0.9)


class TestSampler:
    """Test the Monte Carlo sampler against the exact engine"""

    @pytest.fixture
    def paper_setup(self):
        return JsonSetupRepository().get("paper_setup")

    def test_sample_outcome_is_deterministic(self, paper_setup):
        """Test that a round stream always yields the same pattern"""
        round = RoundSpec.build(Basis.HV, Parity.PARALLEL)
        patterns = {
            sample_outcome(paper_setup.source, paper_setup, round, RoundStream(7, 123)) for _ in range(3)
        }

        assert len(patterns) == 1

    def test_ideal_orthogonal_inconclusive_rate(self):
        """Test the sampled inconclusive rate of the ideal orthogonal round"""
        n = 200_000
        source = SourceParams.ideal()
        network = OpticalNetwork.from_setup(SetupConfig.lossless_balanced())
        uniforms = round_uniforms(11, 0, n)[:, OPTICS_SLOTS]
        masks = sample_patterns(source, network, np.zeros(n), uniforms)

        single_clicks = np.isin(masks, [0, 1, 2, 4, 8]).mean()
        sigma = np.sqrt(0.25 * 0.75 / n)
        assert abs(single_clicks - 0.25) < 5 * sigma

    def test_matches_exact_distribution(self, paper_setup):
        """Test total-variation distance between sampled and exact patterns"""
        n = 1_000_000
        source = paper_setup.source
        network = OpticalNetwork.from_setup(paper_setup)
        round = RoundSpec.build(Basis.HV, Parity.PARALLEL)
        exact = exact_outcome_distribution(source, paper_setup, round)
        overlap = overlap_table(source)[0, 0, 0]

        masks = sample_patterns(source, network, np.full(n, overlap), round_uniforms(5, 0, n)[:, OPTICS_SLOTS])

        assert empirical_distribution(masks).total_variation(exact) < 0.005

    def test_empirical_distribution_skips_missing_patterns(self):
        """Test rounds without a recorded pattern are ignored"""
        distribution = empirical_distribution([-1, 0, 5, 5, -1])

        assert distribution.probability("-") == pytest.approx(1 / 3)
        assert distribution.probability("AC") == pytest.approx(2 / 3)

    def test_empirical_distribution_needs_patterns(self):
        """Test that no recorded pattern is an error"""
        with pytest.raises(PreconditionError, match="No click patterns"):
            empirical_distribution([-1, -1])

    def test_uniform_rows_must_match_rounds(self):
        """Test that the sampler needs one uniform row per round"""
        network = OpticalNetwork.from_setup(SetupConfig.lossless_balanced())
        with pytest.raises(ValueError, match="one row of optics uniforms"):
            sample_patterns(SourceParams.ideal(), network, np.zeros(3), np.zeros((2, 20)))


def _lone_ports(arm_index, upper):
    return [((arm_index, "upper"), upper), ((arm_index, "lower"), 1.0 - upper)]


def _brute_force(source, network, overlap):
    """Sum over every emission, loss, routing, detection and dark-click event"""
    p2 = source.p2
    T = network.bs1_split_ratio
    eta = network.arm_survival
    upper = (T, 1.0 - T)
    port_detection = {
        "upper": ((Detector.A, network.upper_detection[0]), (Detector.B, network.upper_detection[1])),
        "lower": ((Detector.C, network.lower_detection[0]), (Detector.D, network.lower_detection[1])),
    }
    bunched = T * (1.0 - T) * (1.0 + overlap)
    split = T * T + (1.0 - T) ** 2 - 2.0 * T * (1.0 - T) * overlap
    total = np.zeros(16)
    for noise in product((False, True), repeat=2):
        for alive in product((False, True), repeat=4):
            signal_alive, noise_alive = alive[:2], alive[2:]
            if any(a and not n for a, n in zip(noise_alive, noise)):
                continue
            weight = 1.0
            for arm in (0, 1):
                weight *= p2 if noise[arm] else 1.0 - p2
                weight *= eta[arm] if signal_alive[arm] else 1.0 - eta[arm]
                if noise[arm]:
                    weight *= eta[arm] if noise_alive[arm] else 1.0 - eta[arm]
            if all(signal_alive):
                signal_routes = [
                    (["upper", "upper"], bunched),
                    (["lower", "lower"], bunched),
                    (["upper", "lower"], split),
                ]
            else:
                signal_routes = [([], 1.0)]
                for arm in (0, 1):
                    if signal_alive[arm]:
                        signal_routes = [
                            (ports + [port], p * q)
                            for ports, p in signal_routes
                            for (_, port), q in _lone_ports(arm, upper[arm])
                        ]
            routes = signal_routes
            for arm in (0, 1):
                if noise_alive[arm]:
                    routes = [
                        (ports + [port], p * q)
                        for ports, p in routes
                        for (_, port), q in _lone_ports(arm, upper[arm])
                    ]
            for ports, route_weight in routes:
                outcomes = [(0, 1.0)]
                for port in ports:
                    (first, p_first), (second, p_second) = port_detection[port]
                    outcomes = [
                        (mask | bit, p * q)
                        for mask, p in outcomes
                        for bit, q in ((int(first), p_first), (int(second), p_second), (0, 1.0 - p_first - p_second))
                    ]
                for dark in product((False, True), repeat=4):
                    dark_weight = 1.0
                    dark_mask = 0
                    for detector, clicked, p in zip(
                        (Detector.A, Detector.B, Detector.C, Detector.D), dark, network.dark_click_probabilities
                    ):
                        dark_weight *= p if clicked else 1.0 - p
                        dark_mask |= int(detector) if clicked else 0
                    for mask, p in outcomes:
                        total[mask | dark_mask] += weight * route_weight * p * dark_weight
    return total


def _random_network(rng):
    upper = rng.dirichlet([1.0, 1.0, 1.0])[:2]
    lower = rng.dirichlet([1.0, 1.0, 1.0])[:2]
    return OpticalNetwork(
        arm_survival=tuple(float(x) for x in rng.uniform(0.0, 1.0, 2)),
        bs1_split_ratio=float(rng.uniform(0.05, 0.95)),
        upper_detection=tuple(float(x) for x in upper),
        lower_detection=tuple(float(x) for x in lower),
        dark_click_probabilities=tuple(float(x) for x in rng.uniform(0.0, 0.2, 4)),
    )


class TestEngineInvariants:
    """Test properties every outcome distribution must have"""

    @pytest.fixture
    def paper_setup(self):
        return JsonSetupRepository().get("paper_setup")

    def test_normalized_for_random_configurations(self):
        """Test probabilities are nonnegative and sum to one for random networks and sources"""
        rng = np.random.default_rng(17)
        for _ in range(200):
            network = _random_network(rng)
            source = SourceParams(float(rng.uniform(0.0, 0.5)), float(rng.uniform(0.0, 1.0)))

            distribution = distribution_for_overlap(source, network, float(rng.uniform(0.0, 1.0)))

            assert distribution.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
            assert (distribution.probabilities >= 0.0).all()

    def test_matches_brute_force_enumeration(self, paper_setup):
        """Test the convolution engine against explicit enumeration of every event"""
        rng = np.random.default_rng(3)
        networks = [OpticalNetwork.from_setup(paper_setup)] + [_random_network(rng) for _ in range(5)]
        for network in networks:
            for source, overlap in ((SourceParams(0.224, 0.542), 0.3), (SourceParams(0.1, 1.0), 1.0)):
                exact = distribution_for_overlap(source, network, overlap)

                assert exact.probabilities == pytest.approx(_brute_force(source, network, overlap), abs=1e-12)

    def test_click_probability_monotonic_in_arm_transmission(self, paper_setup):
        """Test more transmission never lowers the chance of a click"""
        base = OpticalNetwork.from_setup(paper_setup)
        source = paper_setup.source
        no_click = []
        for scale in np.linspace(0.1, 1.0, 10):
            network = OpticalNetwork(
                tuple(float(scale) * s for s in base.arm_survival),
                base.bs1_split_ratio,
                base.upper_detection,
                base.lower_detection,
            )
            no_click.append(distribution_for_overlap(source, network, 0.5).probability("-"))

        assert all(a >= b for a, b in zip(no_click, no_click[1:]))
        assert no_click[0] > no_click[-1]

    def test_click_probability_monotonic_in_detector_scale(self, paper_setup):
        """Test a larger absolute detector efficiency raises every single-detector click rate"""
        round = RoundSpec.build(Basis.HV, Parity.PARALLEL)
        previous = None
        for scale in (0.1, 0.3, 0.6, 1.0):
            setup = replace(paper_setup, detector_abs_scale=scale)
            distribution = exact_outcome_distribution(setup.source, setup, round)
            clicks = [distribution.click_probability(d) for d in (Detector.A, Detector.B, Detector.C, Detector.D)]
            if previous is not None:
                assert all(c > p for c, p in zip(clicks, previous))
            previous = clicks

    def test_balanced_setup_symmetric_under_port_swap(self):
        """Test A<->C and B<->D leave a balanced lossless distribution unchanged"""
        setup = SetupConfig.lossless_balanced()
        swap = {Detector.A: Detector.C, Detector.C: Detector.A, Detector.B: Detector.D, Detector.D: Detector.B}
        for source in (SourceParams.ideal(), SourceParams(0.1, 0.7)):
            for parity in (Parity.PARALLEL, Parity.ORTHOGONAL):
                distribution = exact_outcome_distribution(source, setup, RoundSpec.build(Basis.DA, parity))

                assert distribution.relabel(swap).probabilities == pytest.approx(distribution.probabilities, abs=1e-12)

    def test_mirrored_network_relabels_detectors(self):
        """Test swapping splitter outputs and T <-> 1 - T maps A, B onto C, D"""
        swap = {Detector.A: Detector.C, Detector.C: Detector.A, Detector.B: Detector.D, Detector.D: Detector.B}
        network = OpticalNetwork((0.6, 0.4), 0.3, (0.5, 0.2), (0.35, 0.1), (0.01, 0.02, 0.03, 0.04))
        mirrored = OpticalNetwork((0.6, 0.4), 0.7, (0.35, 0.1), (0.5, 0.2), (0.03, 0.04, 0.01, 0.02))
        source = SourceParams(0.15, 0.8)

        original = distribution_for_overlap(source, network, 0.6)
        swapped = distribution_for_overlap(source, mirrored, 0.6)

        assert swapped.probabilities == pytest.approx(original.relabel(swap).probabilities, abs=1e-12)
