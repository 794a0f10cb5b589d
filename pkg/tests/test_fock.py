"""Tests for the truncated Fock realization and its operator identities."""

import pytest

from src.config import Config
from src.errors import LevelRangeError, MissingExchangeDataError, ModelValidationError
from src.fock import ExchangeData, FockRealizer, identity_residual


@pytest.fixture
def realizer(config):
    return FockRealizer(config)


def standard_exchange(k_dim, sign):
    if sign > 0:
        return ExchangeData.from_inputs(k_dim, A=0, B=1, C=1, S=1, R=1)
    return ExchangeData.from_inputs(k_dim, A=1, B=0, C=-1, S=-1, R=-1)


class TestBosons:
    @pytest.fixture(scope="class")
    def fock(self, preset_pair):
        model, rs = preset_pair("boson", 2)
        return FockRealizer(Config()).build_fock(model, rs, 4)

    def test_level_dims(self, fock):
        assert fock.level_dims == [1, 2, 3, 4, 5]
        assert fock.total_dim == 15

    def test_structural_identities(self, realizer, fock):
        assert realizer.vacuum_two_point(fock).passed
        assert realizer.check_adjointness(fock).passed
        assert realizer.check_quadratic_kill(fock).passed
        assert realizer.check_level_positivity(fock).passed
        assert realizer.check_gld(fock).passed

    def test_canonical_commutation(self, realizer, fock):
        report = realizer.check_ab_bracket(fock, standard_exchange(1, +1))
        assert report.passed
        assert realizer.check_exchange_tensors(fock, standard_exchange(1, +1)).passed

    def test_number_operator(self, realizer, fock):
        report = realizer.number_operator_report(fock)
        assert report.passed
        assert all(report.data["scalar_on_levels"].values())
        assert report.data["traces"]["J[1,1]"] == ["0", "1", "3", "6", "10"]
        assert report.data["occupation_sums"]["J[2,2]"] == [0, 1, 3, 6, 10]

    def test_anticommutator_fails_on_level_one(self, realizer, fock):
        report = realizer.check_ab_bracket(fock, ExchangeData.from_inputs(1, A=1, B=0))
        assert not report.passed
        mixed = report.find("ab_bracket_mixed")
        assert not mixed.passed
        assert mixed.data["level"] == 1
        assert not report.find("ab_bracket_cc").passed

    def test_operator_matrices(self, realizer, fock):
        creation = realizer.creation_matrix(fock, 1, 0, 2)
        assert (creation.from_level, creation.to_level) == (2, 3)
        assert creation.matrix.shape == (4, 3)
        assert creation.label == "X2+"
        annihilation = realizer.annihilation_matrix(fock, 0, 0, 2)
        assert annihilation.matrix.shape == (2, 3)

    def test_level_range(self, fock):
        with pytest.raises(LevelRangeError):
            fock.creation(0, 4)
        with pytest.raises(LevelRangeError):
            fock.annihilation(0, 0)

    def test_unknown_identity(self, fock):
        with pytest.raises(KeyError):
            identity_residual(fock, "jacobi", [], 0)

    def test_missing_exchange_data(self, realizer, fock):
        with pytest.raises(MissingExchangeDataError):
            realizer.check_ab_bracket(fock, ExchangeData.from_inputs(1, A=0))
        with pytest.raises(MissingExchangeDataError):
            identity_residual(fock, "exchange_s", [0, 0, 1, 0], 0, ExchangeData.from_inputs(1, C=1))


class TestFermions:
    def test_canonical_anticommutation(self, realizer, preset_pair):
        model, rs = preset_pair("fermion", 3)
        fock = realizer.build_fock(model, rs, 3)
        assert fock.level_dims == [1, 3, 3, 1]
        exchange = standard_exchange(1, -1)
        assert realizer.check_ab_bracket(fock, exchange).passed
        assert realizer.check_exchange_tensors(fock, exchange).passed
        assert realizer.check_quadratic_kill(fock).passed

    def test_exchange_adjointness(self, realizer, preset_pair):
        model, _ = preset_pair("fermion", 2)
        assert realizer.check_exchange_adjointness(model, standard_exchange(1, -1)).passed
        bad = ExchangeData.from_inputs(1, C=-1, S=1)
        report = realizer.check_exchange_adjointness(model, bad)
        assert not report.passed
        assert report.witness.context["identity"] == "exchange_adjointness"

    def test_gld_to_level_four(self, realizer, preset_pair):
        model, rs = preset_pair("fermion", 3)
        fock = realizer.build_fock(model, rs, 4)
        assert fock.level_dims == [1, 3, 3, 1, 0]
        assert realizer.check_gld(fock).passed
        assert realizer.check_ab_bracket(fock, standard_exchange(1, -1)).passed
        report = realizer.number_operator_report(fock)
        assert report.passed
        assert report.data["traces"]["J[1,1]"] == ["0", "1", "2", "1", "0"]


class TestSingletPair:
    def test_relations_kill_two_particle_states(self, realizer, preset_pair):
        model, rs = preset_pair("singlet_pair", 1)
        fock = realizer.build_fock(model, rs, 2)
        assert fock.level_dims == [1, 3, 1]
        assert realizer.check_quadratic_kill(fock).passed
        assert realizer.check_adjointness(fock).passed
        assert realizer.vacuum_two_point(fock).passed

    def test_completed_model_breaks_gld_on_level_two(self, realizer, preset_pair):
        model, rs = preset_pair("singlet_pair_completed", 2)
        fock = realizer.build_fock(model, rs, 2)
        assert fock.level_dims == [1, 6, 11]
        report = realizer.number_operator_report(fock)
        assert report.data["traces"]["J[1,1]"][2] == "11"
        assert report.data["scalar_on_levels"]["2"]

        gld = realizer.check_gld(fock)
        assert not gld.passed
        commutators = gld.find("gld_commutators")
        assert not commutators.passed
        assert (commutators.data["level"], commutators.data["params"]) == (2, [0, 0, 0, 1])
        assert "{-14/27, -4/9, 2/9, 10/27, 28/27, 10/9}" in commutators.details
        witness = commutators.witness
        assert witness.context["key"] == "gld_commutator"
        residual = identity_residual(fock, "gld_commutator", [0, 0, 0, 1], 2)
        assert residual.apply(witness.input) == witness.difference

    def test_completed_model_to_level_four(self, realizer, preset_pair):
        model, rs = preset_pair("singlet_pair_completed", 2)
        fock = realizer.build_fock(model, rs, 4)
        assert fock.level_dims == [1, 6, 11, 6, 1]
        assert realizer.vacuum_two_point(fock).passed
        assert realizer.check_adjointness(fock).passed
        assert realizer.check_quadratic_kill(fock).passed
        assert realizer.check_level_positivity(fock).passed
        commutators = realizer.check_gld(fock).find("gld_commutators")
        assert not commutators.passed
        assert commutators.data["level"] == 2


class TestExchangeData:
    def test_scalar_conventions(self):
        ex = ExchangeData.from_inputs(2, A=1, C=1)
        assert ex.component("A", 0, 1, 0, 1) == 1
        assert ex.component("A", 1, 0, 0, 1) == 0
        assert ex.component("C", 1, 0, 0, 1) == 1
        assert ex.component("C", 0, 1, 0, 1) == 0
        assert not ex.has("S")

    def test_wrong_length(self):
        with pytest.raises(ModelValidationError) as exc:
            ExchangeData.from_inputs(2, A=[0] * 15)
        assert exc.value.field == "exchange.A"

    def test_unknown_tensor(self):
        with pytest.raises(ModelValidationError):
            ExchangeData.from_inputs(1, Z=1)

    def test_to_dict(self):
        assert ExchangeData.from_inputs(1, S="-1").to_dict() == {"S": ["-1"]}


class TestSmallLevels:
    def test_single_boson(self, realizer, preset_pair):
        model, rs = preset_pair("boson", 1)
        assert realizer.build_fock(model, rs, 3).level_dims == [1, 1, 1, 1]

    def test_pauli_exclusion(self, realizer, preset_pair):
        model, rs = preset_pair("fermion", 2)
        fock = realizer.build_fock(model, rs, 3)
        assert fock.level_dims == [1, 2, 1, 0]
        creation = fock.creation(0, 1)
        assert all(x == 0 for x in creation.column(0))
        assert any(x != 0 for x in creation.column(1))
        two_point = identity_residual(fock, "vacuum_two_point", [], 0)
        assert two_point.is_zero()
