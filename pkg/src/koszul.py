"""
Koszul-dual quadratic data and the truncated duality identity.

The dual space is identified with the original one through the Gram matrix,
so the dual relations R^⊥ live in the same coordinates as R_gen and their
orthogonal projector is I − P_gen.
"""

import logging
from dataclasses import dataclass

from .checks import CheckReport, Witness
from .config import Config
from .exactla import RationalMatrix, Subspace, annihilator, orthogonal_projector
from .hilbert import HilbertSeriesCalculator, SeriesCoeffs, series_multiply, sign_flip
from .statmodel import RelationSet


@dataclass(frozen=True)
class DualData:
    r_perp: Subspace
    dual_projector: RationalMatrix
    base_dim: int

    @property
    def as_relation_set(self) -> RelationSet:
        """The dual data viewed as a relation set in its own right."""
        n = self.r_perp.ambient_dim
        return RelationSet(
            ambient=n,
            base_dim=self.base_dim,
            p_gen=self.dual_projector,
            p_gen_perp=RationalMatrix.identity(n) - self.dual_projector,
            r_gen=self.r_perp,
            vectors=tuple(self.dual_projector.transpose().row_list()),
        )


class KoszulDual:
    """Builds dual relations and checks H_A(t)·H_{A!}(−t) = 1."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.hilbert = HilbertSeriesCalculator(config)

    def dual_relations(self, rs: RelationSet, gram: RationalMatrix) -> DualData:
        """R^⊥ = {φ : ⟨φ, r⟩_gram = 0 for r ∈ R_gen} with its orthogonal projector."""
        r_perp = annihilator(rs.r_gen, gram)
        projector = orthogonal_projector(r_perp, gram)
        self.logger.info(f"Dual relations: dim {r_perp.dim} = {rs.ambient} - {rs.r_gen.dim}")
        return DualData(r_perp=r_perp, dual_projector=projector, base_dim=rs.base_dim)

    def dual_series(self, dd: DualData, n: int) -> SeriesCoeffs:
        """Graded dimensions of the dual algebra, computed by the kernel method."""
        series = self.hilbert.series_from_projector(dd.dual_projector, dd.base_dim, n)
        self.logger.info(f"Dual series: {list(series.coeffs)}")
        return series

    def check_koszul_identity(self, g: SeriesCoeffs, g_dual: SeriesCoeffs, n: int,
                              sector: str = "single") -> CheckReport:
        """G(t)·G!(−t) ≡ 1 mod t^{n+1}."""
        n = min(n, g.degree, g_dual.degree)
        product = series_multiply(g.coeffs, sign_flip(g_dual.coeffs), n)
        for degree, value in enumerate(product):
            expected = 1 if degree == 0 else 0
            if value != expected:
                witness = Witness(context={"identity": "koszul", "sector": sector, "degree": degree,
                                           "value": value, "expected": expected})
                self.logger.warning(f"Koszul identity fails at degree {degree}: coefficient {value}")
                return CheckReport.failure(
                    "koszul_identity", witness,
                    f"coefficient of t^{degree} in G(t)G!(-t) is {value}, expected {expected}",
                    product=product)
        return CheckReport.success("koszul_identity", f"G(t)G!(-t) = 1 mod t^{n + 1}", product=product)

    def check_double_dual(self, rs: RelationSet, gram: RationalMatrix) -> CheckReport:
        """Dualizing twice returns R_gen."""
        once = self.dual_relations(rs, gram)
        twice = annihilator(once.r_perp, gram)
        dims = {"r_gen": rs.r_gen.dim, "r_perp": once.r_perp.dim, "ambient": rs.ambient}
        if twice == rs.r_gen and once.r_perp.dim + rs.r_gen.dim == rs.ambient:
            return CheckReport.success("double_dual", "(R^⊥)^⊥ = R_gen", **dims)
        witness = Witness(context={"identity": "double_dual", **dims, "double_dual": twice.dim})
        return CheckReport.failure("double_dual", witness,
                                   f"double dual has dimension {twice.dim}", **dims)
