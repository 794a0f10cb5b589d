"""Property-based tests for the linear algebra kernel and the quotient oracle.

Random models draw a diagonal positive form and random integer spans for the
internal spaces; the graded kernel dimensions must agree with the quotient
dimensions computed from ideal sums in every case.
"""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from src.config import Config
from src.exactla import (
    RationalMatrix,
    Subspace,
    annihilator,
    intersect,
    kernel,
    kron,
    rank,
)
from src.hilbert import HilbertSeriesCalculator
from src.statmodel import StatModel, assemble_pgen

small_ints = st.integers(min_value=-2, max_value=2)


@st.composite
def matrices(draw, rows=None, cols=None):
    rows = rows if rows is not None else draw(st.integers(min_value=1, max_value=3))
    cols = cols if cols is not None else draw(st.integers(min_value=1, max_value=3))
    entries = draw(st.lists(small_ints, min_size=rows * cols, max_size=rows * cols))
    return RationalMatrix.from_flat(rows, cols, entries)


@st.composite
def subspaces(draw, ambient):
    count = draw(st.integers(min_value=0, max_value=ambient))
    vectors = draw(st.lists(st.lists(small_ints, min_size=ambient, max_size=ambient),
                            min_size=count, max_size=count))
    return Subspace.span(vectors, ambient)


@st.composite
def stat_models(draw):
    d = draw(st.integers(min_value=1, max_value=2))
    k = draw(st.integers(min_value=1, max_value=3 if d == 1 else 2))
    diagonal = draw(st.lists(st.integers(min_value=1, max_value=3), min_size=k, max_size=k))
    w_sym = draw(subspaces(k * k))
    w_ext = draw(subspaces(k * k)) if d > 1 else Subspace.zero(k * k)
    return StatModel(d=d, k_dim=k, g=RationalMatrix.diagonal(diagonal),
                     w_sym=w_sym, w_ext=w_ext, name="random")


class TestKernelLaws:
    @given(matrices(), matrices(), matrices(), matrices())
    def test_kron_mixed_product(self, a, b, c, d):
        """(A⊗B)(C⊗D) = AC⊗BD whenever the products are defined."""
        if a.cols != c.rows or b.cols != d.rows:
            return
        assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)

    @given(subspaces(3), subspaces(3), subspaces(3))
    def test_intersection_laws(self, u, v, w):
        assert intersect(u, v) == intersect(v, u)
        assert intersect(intersect(u, v), w) == intersect(u, intersect(v, w))
        assert intersect(u, u) == u

    @given(subspaces(4), st.lists(st.integers(min_value=1, max_value=4), min_size=4, max_size=4))
    def test_annihilator_is_an_involution(self, space, weights):
        gram = RationalMatrix.diagonal(weights)
        once = annihilator(space, gram)
        assert once.dim + space.dim == 4
        assert annihilator(once, gram) == space

    @given(matrices())
    def test_kernel_vectors_are_annihilated(self, m):
        null = kernel(m)
        assert null.dim == m.cols - rank(m)
        for v in null.vectors():
            assert all(x == Fraction(0) for x in m.apply(v))


@pytest.mark.slow
class TestQuotientOracle:
    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(stat_models())
    def test_kernel_dims_match_quotient_dims(self, model):
        """dim W_n equals dim T(H)_n / ideal_n for n <= 3."""
        rs = assemble_pgen(model)
        calculator = HilbertSeriesCalculator(Config())
        series = calculator.full_series(model, rs, 3)
        for n in range(4):
            assert calculator.quotient_dimension(rs.r_gen, rs.base_dim, n) == series.coeffs[n]

    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(stat_models())
    def test_rank_bookkeeping(self, model):
        rs = assemble_pgen(model)
        d = model.d
        expected = d * (d + 1) // 2 * model.w_sym.dim + d * (d - 1) // 2 * model.w_ext.dim
        assert rs.rank == expected
