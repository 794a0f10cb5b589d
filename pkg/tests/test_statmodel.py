"""Tests for statistics models and relation assembly."""

from fractions import Fraction

import pytest

from src.errors import ModelValidationError
from src.exactla import RationalMatrix, Subspace, is_projector
from src.statmodel import (
    PRESET_NAMES,
    StatModel,
    assemble_pgen,
    block_to_generator,
    check_equivariance,
    decompose_relations,
    external_projectors,
    preset,
    relation_vector,
    relation_vectors,
    signed_permutations,
    singlet_exchange_vector,
    swap_matrix,
)


class TestModelValidation:
    def test_asymmetric_form_names_the_entry_pair(self):
        g = RationalMatrix.from_rows([[1, 1], [0, 1]])
        with pytest.raises(ModelValidationError) as exc:
            StatModel(d=1, k_dim=2, g=g, w_sym=Subspace.zero(4), w_ext=Subspace.zero(4))
        assert exc.value.field == "model.g"
        assert "g[1,2] = 1" in str(exc.value)
        assert "g[2,1] = 0" in str(exc.value)

    def test_indefinite_form(self):
        g = RationalMatrix.from_rows([[1, 2], [2, 1]])
        with pytest.raises(ModelValidationError, match="positive definite"):
            StatModel(d=1, k_dim=2, g=g, w_sym=Subspace.zero(4), w_ext=Subspace.zero(4))

    def test_internal_space_in_wrong_dimension(self):
        with pytest.raises(ModelValidationError) as exc:
            StatModel(d=1, k_dim=2, g=RationalMatrix.identity(2),
                      w_sym=Subspace.full(3), w_ext=Subspace.zero(4))
        assert exc.value.field == "model.w_sym"

    def test_order_must_be_a_permutation(self):
        with pytest.raises(ModelValidationError):
            StatModel(d=2, k_dim=1, g=RationalMatrix.identity(1), w_sym=Subspace.zero(1),
                      w_ext=Subspace.full(1), order=(0, 0))

    def test_unknown_preset(self):
        with pytest.raises(ModelValidationError):
            preset("anyon")


class TestLabels:
    def test_generator_labels(self):
        assert preset("singlet_pair", 2).generator_label(4) == "X[2,2]"
        assert preset("singlet_pair", 1).generator_label(2) == "X3"
        assert preset("boson", 2).generator_label(1) == "X2"
        assert preset("singlet_pair", 1).word_label((0, 1, 1)) == "X1X2X2"

    def test_single_mode(self):
        model = preset("singlet_pair_completed", 2)
        single = model.single_mode()
        assert single.d == 1
        assert single.w_ext.dim == 0
        assert single.w_sym == model.w_sym


class TestAssembly:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_external_projectors(self, d):
        p_sym, p_ext = external_projectors(d)
        identity = RationalMatrix.identity(d * d)
        assert p_sym + p_ext == identity
        assert p_sym.trace() == d * (d + 1) // 2
        assert p_ext.trace() == d * (d - 1) // 2
        assert (swap_matrix(d) @ swap_matrix(d)) == identity

    def test_block_to_generator_is_a_permutation(self):
        perm = block_to_generator(2, 3)
        assert sorted(perm) == list(range(36))

    @pytest.mark.parametrize("name,d,expected", [
        ("boson", 2, 1),
        ("boson", 3, 3),
        ("fermion", 2, 3),
        ("fermion", 3, 6),
        ("singlet_pair", 1, 8),
        ("singlet_pair", 2, 24),
        ("singlet_pair_completed", 2, 25),
    ])
    def test_rank_bookkeeping(self, preset_pair, name, d, expected):
        model, rs = preset_pair(name, d)
        assert rs.rank == expected
        assert is_projector(rs.p_gen, model.gram_pair)
        assert rs.p_gen + rs.p_gen_perp == RationalMatrix.identity(rs.ambient)

    def test_boson_relation_vector(self, preset_pair):
        model, rs = preset_pair("boson", 2)
        half = Fraction(1, 2)
        assert relation_vector(rs, model, 0, 1, 0, 0) == (0, half, -half, 0)
        assert relation_vector(rs, model, 0, 0, 0, 0) == (0, 0, 0, 0)

    def test_relation_vectors_span_r_gen(self, preset_pair):
        model, rs = preset_pair("singlet_pair_completed", 2)
        vectors = relation_vectors(rs, model)
        assert len(vectors) == 36
        assert Subspace.span(vectors, rs.ambient) == rs.r_gen

    def test_weighted_form(self):
        g = RationalMatrix.diagonal([1, 2])
        w_sym = Subspace.span([[0, 1, 1, 0]], 4)
        model = StatModel(d=2, k_dim=2, g=g, w_sym=w_sym, w_ext=Subspace.zero(4))
        rs = assemble_pgen(model)
        assert rs.rank == 3
        assert is_projector(rs.p_gen, model.gram_pair)


class TestDecomposition:
    @pytest.mark.parametrize("name,d", [("boson", 2), ("fermion", 3), ("singlet_pair_completed", 2)])
    def test_round_trip(self, preset_pair, name, d):
        model, rs = preset_pair(name, d)
        w_sym, w_ext = decompose_relations(rs.r_gen, model.d, model.k_dim)
        assert w_sym == model.w_sym
        assert w_ext == model.w_ext

    def test_non_invariant_relations(self):
        relations = Subspace.span([[1, 0, 0, 0]], 4)
        with pytest.raises(ModelValidationError, match="U\\(d\\)-invariant"):
            decompose_relations(relations, 2, 1)


class TestEquivariance:
    def test_signed_permutation_count(self):
        assert len(list(signed_permutations(2))) == 8
        assert len(list(signed_permutations(3))) == 48

    @pytest.mark.parametrize("name,d", [("boson", 2), ("fermion", 2), ("singlet_pair_completed", 2)])
    def test_presets_are_equivariant(self, preset_pair, name, d):
        model, rs = preset_pair(name, d)
        report = check_equivariance(rs, model)
        assert report.passed
        assert report.data["samples"] == 8

    def test_limit(self, preset_pair):
        model, rs = preset_pair("boson", 3)
        assert check_equivariance(rs, model, limit=5).data["samples"] == 5


class TestPresets:
    def test_names(self):
        assert set(PRESET_NAMES) == {"boson", "fermion", "singlet_pair", "singlet_pair_completed"}

    def test_worked_example_alias(self):
        model = preset("example_sec5", 2)
        assert model == preset("singlet_pair", 2)
        assert model.w_sym.dim == 8
        with pytest.raises(ModelValidationError):
            preset("example_sec6", 2)

    def test_singlet_spaces(self):
        model = preset("singlet_pair", 2)
        h = [1, 0, 0, 0, 1, 0, 0, 0, 1]
        assert model.w_sym.dim == 8
        assert not model.w_sym.contains(h)
        assert model.w_ext.dim == 0
        assert model.n_max == 4
        assert model.name == "singlet_pair.d2"

    def test_completed_exchange_vector(self):
        model = preset("singlet_pair_completed", 2)
        assert model.w_ext.dim == 1
        assert model.w_ext.contains(singlet_exchange_vector())
        assert sum(singlet_exchange_vector()[i * 4] for i in range(3)) == 2
