"""Tests for graded kernels and Hilbert series."""

from math import comb

import pytest

from src.config import Config
from src.errors import DimensionGuardError
from src.hilbert import (
    HilbertSeriesCalculator,
    SeriesCoeffs,
    series_multiply,
    series_power,
    sign_flip,
)


@pytest.fixture
def calculator(config):
    return HilbertSeriesCalculator(config)


class TestSeriesArithmetic:
    def test_multiply(self):
        assert series_multiply([1, 1], [1, 1], 3) == [1, 2, 1, 0]

    def test_power(self):
        assert series_power([1, 1], 3, 4) == [1, 3, 3, 1, 0]
        assert series_power([1, 3, 1], 2, 4) == [1, 6, 11, 6, 1]

    def test_sign_flip(self):
        assert sign_flip([1, 2, 3]) == [1, -2, 3]

    def test_series_block(self):
        series = SeriesCoeffs((1, 3, 1, 0, 0), 3)
        assert series.degree == 4
        assert series.to_dict()["terminated_at"] == 3


class TestPresetSeries:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_boson(self, calculator, preset_pair, d):
        model, rs = preset_pair("boson", d)
        full = calculator.full_series(model, rs, 5)
        assert list(full.coeffs) == [comb(n + d - 1, d - 1) for n in range(6)]
        assert full.terminated_at is None
        assert list(calculator.single_mode_series(model, 6).coeffs) == [1] * 7

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_fermion(self, calculator, preset_pair, d):
        model, rs = preset_pair("fermion", d)
        full = calculator.full_series(model, rs, 5)
        assert list(full.coeffs) == [comb(d, n) for n in range(6)]
        assert full.terminated_at == d + 1

    def test_singlet_single_mode(self, calculator, preset_pair):
        model, _ = preset_pair("singlet_pair", 2)
        series = calculator.single_mode_series(model, 4)
        assert list(series.coeffs) == [1, 3, 1, 0, 0]
        assert series.terminated_at == 3

    def test_completed_full_series_factorizes(self, calculator, preset_pair):
        model, rs = preset_pair("singlet_pair_completed", 2)
        single = calculator.single_mode_series(model, 4)
        full = calculator.full_series(model, rs, 4)
        assert list(full.coeffs) == [1, 6, 11, 6, 1]
        assert calculator.check_factorization(model, single, full).passed

    def test_uncompleted_factorization_fails_at_degree_two(self, calculator, preset_pair):
        model, rs = preset_pair("singlet_pair", 2)
        single = calculator.single_mode_series(model, 4)
        full = calculator.full_series(model, rs, 2)
        assert list(full.coeffs) == [1, 6, 12]
        report = calculator.check_factorization(model, single, full)
        assert not report.passed
        assert report.witness.context == {"identity": "factorization", "degree": 2,
                                          "full": 12, "expected": 11}


class TestMethods:
    def test_direct_and_incremental_agree(self, calculator, preset_pair):
        model, _ = preset_pair("singlet_pair", 1)
        projector = calculator.single_mode_projector(model)
        for n in range(4):
            incremental = calculator.graded_kernel(projector, 3, n)
            direct = calculator.graded_kernel(projector, 3, n, method="direct")
            assert incremental.space == direct.space

    def test_explicit_intersection(self, calculator, preset_pair):
        model, rs = preset_pair("fermion", 3)
        assert calculator.direct_intersection(rs.p_gen, 3, 3).dim == 1

    def test_unknown_method(self, calculator, preset_pair):
        model, rs = preset_pair("boson", 2)
        with pytest.raises(ValueError):
            calculator.graded_kernel(rs.p_gen, 2, 2, method="guess")

    @pytest.mark.parametrize("name,d", [("singlet_pair", 1), ("boson", 2), ("fermion", 2)])
    def test_quotient_oracle(self, calculator, preset_pair, name, d):
        model, rs = preset_pair(name, d)
        series = calculator.full_series(model, rs, 3)
        for n in range(4):
            assert calculator.quotient_dimension(rs.r_gen, rs.base_dim, n) == series.coeffs[n]

    def test_ideal_dimension_of_singlet(self, calculator, preset_pair):
        model, rs = preset_pair("singlet_pair", 1)
        assert calculator.ideal_dimension(rs.r_gen, 3, 2) == 8
        assert calculator.ideal_dimension(rs.r_gen, 3, 3) == 27


class TestGuards:
    def test_guard_stops_large_powers(self, preset_pair):
        model, rs = preset_pair("singlet_pair", 2)
        calculator = HilbertSeriesCalculator(Config(guard_dim=100))
        with pytest.raises(DimensionGuardError) as exc:
            calculator.full_series(model, rs, 3)
        assert exc.value.dim == 216
        assert exc.value.limit == 100
