import json

import pytest
from src.domain.entities import DETECTORS, Arm, Basis, CountsTable, Detector, Parity, RoundSpec, SetupConfig
from src.domain.errors import ConfigError, DomainError
from src.domain.optics import exact_outcome_distribution
from src.domain.setup import conditional_answers, normalized_coincidences, path_survival
from src.infrastructure.config import JsonSetupRepository
from src.infrastructure.storage import CsvCountsRepository


class TestLoadConfig:
    """Test loading setup documents"""

    @pytest.fixture
    def repo(self):
        return JsonSetupRepository()

    @pytest.fixture
    def paper_document(self, repo):
        return json.loads(repo.read_text("paper_setup"))

    def test_paper_setup_arm_transmissions(self, repo):
        """Test the composed arm transmissions of the bundled setup"""
        config = repo.get("paper_setup")

        assert config.arm_transmission(Arm.V0) == pytest.approx(0.477, abs=1e-3)
        assert config.arm_transmission(Arm.V1) == pytest.approx(0.420, abs=1e-3)

    def test_paper_setup_split_ratios(self, repo):
        """Test the split ratios are carried over exactly"""
        config = repo.get("paper_setup")

        assert config.beamsplitters["BS1"].split_ratio_upper == 0.545
        assert config.beamsplitters["BS1"].split_ratio_lower == pytest.approx(0.455)
        assert config.beamsplitters["BS2"].split_ratio_upper == 0.441
        assert config.beamsplitters["BS3"].split_ratio_upper == 0.53

    def test_paper_setup_source(self, repo):
        """Test the bundled source selects the effective overlap convention"""
        source = repo.get("paper_setup").source

        assert source.g2 == 0.224
        assert source.indistinguishability == 0.542
        assert source.overlap_convention == "effective"
        assert source.g2_uncertainty == 0.017
        assert source.indistinguishability_uncertainty == 0.101

    def test_paper_setup_resolves_by_name(self, repo):
        """Test the bundled setup is addressable by its bare name"""
        config = repo.get("paper_setup")

        assert config.name == "paper_setup"
        assert config.protocol.enabled_bases == (Basis.HV,)

    def test_negative_uncertainty(self, repo, paper_document):
        """Test that a negative source uncertainty names its key"""
        paper_document["source"]["g2_uncertainty"] = -0.1

        with pytest.raises(ConfigError, match=r"source\.g2_uncertainty"):
            repo.parse(json.dumps(paper_document))

    def test_transmission_above_one(self, repo, paper_document):
        """Test that an out-of-range transmission names its key"""
        paper_document["arms"]["V0"]["switch"] = 1.2

        with pytest.raises(ConfigError, match=r"arms\.V0\.switch"):
            repo.parse(json.dumps(paper_document))

    def test_missing_key(self, repo, paper_document):
        """Test that a missing section names its key"""
        del paper_document["source"]

        with pytest.raises(ConfigError, match="source"):
            repo.parse(json.dumps(paper_document))

    def test_malformed_number(self, repo, paper_document):
        """Test that a string where a number belongs is rejected"""
        paper_document["source"]["g2"] = "0.2x"

        with pytest.raises(ConfigError, match=r"source\.g2"):
            repo.parse(json.dumps(paper_document))

    def test_unknown_key(self, repo, paper_document):
        """Test that unknown keys are rejected"""
        paper_document["geometry"]["altitude_m"] = 3.0

        with pytest.raises(ConfigError, match=r"geometry\.altitude_m"):
            repo.parse(json.dumps(paper_document))

    def test_unsupported_schema_version(self, repo, paper_document):
        """Test that only schema version 1 is accepted"""
        paper_document["schema_version"] = 2

        with pytest.raises(ConfigError, match="schema_version"):
            repo.parse(json.dumps(paper_document))

    def test_entity_validation_names_section(self, repo, paper_document):
        """Test that geometry ordering errors name the geometry section"""
        paper_document["geometry"]["prover_position_m"] = 500.0

        with pytest.raises(ConfigError, match="geometry"):
            repo.parse(json.dumps(paper_document))

    def test_canonical_round_trip(self, repo):
        """Test that bundled documents are stored in canonical form"""
        for name in ("paper_setup", "lossless_balanced"):
            text = repo.read_text(name)
            assert repo.serialize(repo.parse(text)) == text

    def test_missing_file(self, repo):
        """Test that an unknown name is a missing file"""
        with pytest.raises(FileNotFoundError, match="no_such_setup"):
            repo.get("no_such_setup")


class TestPathSurvival:
    """Test composed path survival"""

    def test_lossless_setup(self):
        """Test that an all-unity setup loses nothing"""
        config = SetupConfig.lossless_balanced()

        for arm in Arm:
            for detector in DETECTORS:
                assert path_survival(config, arm, detector) == 1.0

    def test_paper_setup_path(self):
        """Test V0 to A survival through the bundled setup"""
        config = JsonSetupRepository().get("paper_setup")

        assert path_survival(config, Arm.V0, Detector.A) == pytest.approx(0.1227, abs=1e-3)


class TestCoincidenceAnalysis:
    """Test normalized coincidences and conditional answers"""

    def test_normalized_coincidence_formula(self):
        """Test CC_ij / (SC_i SC_j)"""
        counts = CountsTable(
            coincidences={"AB": 100}, singles={"A": 1_000_000, "B": 2_000_000, "C": 1, "D": 1}
        )
        normalized = normalized_coincidences(counts)

        assert normalized["AB"] == pytest.approx(5e-11)
        assert normalized["CD"] == 0.0

    def test_zero_singles_names_detector(self):
        """Test that a detector without singles cannot be normalized"""
        counts = CountsTable(coincidences={"AB": 1}, singles={"A": 5, "B": 0})

        with pytest.raises(DomainError, match="Detector B"):
            normalized_coincidences(counts, ["AB"])

    def test_measured_orthogonal_counts(self):
        """Test P(0|concl.) of the bundled orthogonal coincidences"""
        counts = CsvCountsRepository().load("measured_coincidences_orthogonal")
        answers = conditional_answers(counts)

        assert answers["0"] == pytest.approx(0.34, abs=5e-3)
        assert answers["0"] + answers["1"] == pytest.approx(1.0)

    def test_measured_parallel_counts(self):
        """Test P(0|concl.) of the bundled parallel coincidences"""
        counts = CsvCountsRepository().load("measured_coincidences_parallel")

        assert conditional_answers(counts)["0"] == pytest.approx(0.48, abs=5e-3)

    def test_no_coincidences_raises_error(self):
        """Test that empty counts have no conditional answers"""
        with pytest.raises(DomainError, match="No coincidences"):
            conditional_answers(CountsTable(coincidences={}, singles={}))

    def test_orthogonal_normalized_coincidences_flat(self):
        """Test all six normalized orthogonal coincidences agree within 5% over 10^7 rounds"""
        # Arrange
        config = JsonSetupRepository().get("paper_setup")
        round = RoundSpec.build(Basis.HV, Parity.ORTHOGONAL)
        counts = CountsTable.from_distribution(
            exact_outcome_distribution(config.source, config, round), 10_000_000
        )

        # Act
        normalized = normalized_coincidences(counts)

        # Assert
        assert max(normalized.values()) / min(normalized.values()) < 1.05

    def test_normalization_removes_path_imbalance(self):
        """Test unequal detector efficiencies spread raw coincidences but not normalized ones"""
        config = JsonSetupRepository().get("paper_setup")
        round = RoundSpec.build(Basis.HV, Parity.ORTHOGONAL)
        counts = CountsTable.from_distribution(
            exact_outcome_distribution(config.source, config, round), 10_000_000
        )

        raw = counts.coincidences
        normalized = normalized_coincidences(counts)

        raw_spread = max(raw.values()) / min(raw.values())
        normalized_spread = max(normalized.values()) / min(normalized.values())
        assert raw_spread > 3.0
        assert normalized_spread < raw_spread / 3.0
