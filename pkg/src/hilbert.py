"""
Graded dimensions of quadratic algebras.

Level n of the quotient is realized inside the n-th tensor power as
W_n = ∩_k ker(id^{k} ⊗ P ⊗ id^{n-k-2}) for an orthogonal relation
projector P on base⊗base. The default schedule builds W_{n+1} from
W_n ⊗ base and only imposes the condition on the last two slots.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .checks import CheckReport, Witness
from .config import Config
from .exactla import (
    RationalMatrix,
    Subspace,
    apply_local,
    intersect,
    kernel,
    kron_vectors,
    local_operator,
    restricted_kernel,
    subspace_sum,
    unit_vector,
    vstack,
)
from .statmodel import RelationSet, StatModel, assemble_pgen

METHODS = ("incremental", "direct")


@dataclass(frozen=True)
class SeriesCoeffs:
    """Truncated Hilbert–Poincaré series g_0..g_N."""

    coeffs: tuple
    terminated_at: Optional[int] = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_dict(self) -> dict:
        return {"coeffs": list(self.coeffs), "terminated_at": self.terminated_at}


@dataclass(frozen=True)
class GradedKernel:
    degree: int
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim


def series_multiply(a: Sequence[int], b: Sequence[int], n: int) -> List[int]:
    """Product of two truncated series modulo t^{n+1}."""
    out = [0] * (n + 1)
    for i, x in enumerate(a[:n + 1]):
        if x:
            for j, y in enumerate(b[:n + 1 - i]):
                out[i + j] += x * y
    return out


def series_power(a: Sequence[int], power: int, n: int) -> List[int]:
    out = [1] + [0] * n
    for _ in range(power):
        out = series_multiply(out, a, n)
    return out


def sign_flip(a: Sequence[int]) -> List[int]:
    """a(t) ↦ a(−t)."""
    return [x if i % 2 == 0 else -x for i, x in enumerate(a)]


class HilbertSeriesCalculator:
    """Computes graded kernels and the series built from them."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)

    def graded_kernel(self, projector: RationalMatrix, base_dim: int, n: int,
                      method: str = "incremental") -> GradedKernel:
        """W_n for the relation projector on base⊗base."""
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        if method == "direct":
            return self._direct_kernel(projector, base_dim, n)
        return self.graded_kernels(projector, base_dim, n)[n]

    def graded_kernels(self, projector: RationalMatrix, base_dim: int, n: int) -> List[GradedKernel]:
        """W_0..W_n by the incremental schedule."""
        self.config.check_dimension(base_dim ** n, f"degree-{n} tensor power")
        levels = [GradedKernel(0, Subspace.full(1))]
        if n >= 1:
            levels.append(GradedKernel(1, Subspace.full(base_dim)))
        for m in range(2, n + 1):
            previous = levels[-1].space
            ambient = base_dim ** m
            if previous.dim == 0:
                levels.append(GradedKernel(m, Subspace.zero(ambient)))
                continue
            candidates = [kron_vectors(w, unit_vector(base_dim, c))
                          for w in previous.vectors() for c in range(base_dim)]
            images = [apply_local(projector, v, base_dim, m, m - 2) for v in candidates]
            space = restricted_kernel(candidates, images, ambient)
            self.logger.debug(f"W_{m}: dim {space.dim} from {len(candidates)} candidates")
            levels.append(GradedKernel(m, space))
        return levels

    def _direct_kernel(self, projector: RationalMatrix, base_dim: int, n: int) -> GradedKernel:
        ambient = base_dim ** n
        self.config.check_dimension(ambient, f"degree-{n} tensor power")
        if n < 2:
            return GradedKernel(n, Subspace.full(ambient))
        stacked = vstack([local_operator(projector, base_dim, n, k) for k in range(n - 1)])
        return GradedKernel(n, kernel(stacked))

    def direct_intersection(self, projector: RationalMatrix, base_dim: int, n: int) -> Subspace:
        """W_n as an explicit intersection of the n−1 shifted kernels."""
        ambient = base_dim ** n
        self.config.check_dimension(ambient, f"degree-{n} tensor power")
        space = Subspace.full(ambient)
        for k in range(n - 1):
            space = intersect(space, kernel(local_operator(projector, base_dim, n, k)))
        return space

    def series_from_projector(self, projector: RationalMatrix, base_dim: int, n: int) -> SeriesCoeffs:
        levels = self.graded_kernels(projector, base_dim, n)
        coeffs = tuple(level.dim for level in levels)
        terminated_at = next((m for m, c in enumerate(coeffs) if c == 0), None)
        if terminated_at is not None:
            self._spot_check_termination(projector, base_dim, terminated_at, n)
        return SeriesCoeffs(coeffs, terminated_at)

    def _spot_check_termination(self, projector: RationalMatrix, base_dim: int,
                                m: int, n: int) -> None:
        if m + 1 > n or base_dim ** (m + 1) > self.config.spot_check_dim:
            return
        extra = self._direct_kernel(projector, base_dim, m + 1).dim
        if extra != 0:
            raise AssertionError(f"level {m} vanished but direct level {m + 1} has dim {extra}")
        self.logger.debug(f"Termination at degree {m} confirmed directly at degree {m + 1}")

    def single_mode_projector(self, model: StatModel) -> RationalMatrix:
        return assemble_pgen(model.single_mode()).p_gen

    def single_mode_series(self, model: StatModel, n: int) -> SeriesCoeffs:
        """G(t) up to t^n from the d = 1 specialization of the relations."""
        series = self.series_from_projector(self.single_mode_projector(model), model.k_dim, n)
        self.logger.info(f"Single-mode series of {model.name}: {list(series.coeffs)}")
        return series

    def full_series(self, model: StatModel, rs: RelationSet, n: int) -> SeriesCoeffs:
        """H_F(t) up to t^n on the full generator space."""
        series = self.series_from_projector(rs.p_gen, rs.base_dim, n)
        self.logger.info(f"Full series of {model.name}: {list(series.coeffs)}")
        return series

    def check_factorization(self, model: StatModel, single: SeriesCoeffs,
                            full: SeriesCoeffs) -> CheckReport:
        """H_F(t) = G(t)^d term by term."""
        n = min(single.degree, full.degree)
        expected = series_power(single.coeffs, model.d, n)
        for degree in range(n + 1):
            if full.coeffs[degree] != expected[degree]:
                witness = Witness(context={
                    "identity": "factorization",
                    "degree": degree,
                    "full": full.coeffs[degree],
                    "expected": expected[degree],
                })
                self.logger.warning(f"Factorization fails at degree {degree}: "
                                    f"{full.coeffs[degree]} != {expected[degree]}")
                return CheckReport.failure(
                    "factorization", witness,
                    f"full series has {full.coeffs[degree]} at degree {degree}, "
                    f"G(t)^{model.d} has {expected[degree]}",
                    expected=expected, full=list(full.coeffs[:n + 1]))
        return CheckReport.success("factorization", f"H_F = G^{model.d} through degree {n}",
                                   expected=expected)

    def ideal_dimension(self, relations: Subspace, base_dim: int, n: int) -> int:
        """dim of the degree-n ideal component, as a sum of relation copies."""
        ambient = base_dim ** n
        self.config.check_dimension(ambient, f"degree-{n} tensor power")
        if n < 2 or relations.dim == 0:
            return 0
        total = Subspace.zero(ambient)
        for k in range(n - 1):
            left = Subspace.full(base_dim ** k)
            right = Subspace.full(base_dim ** (n - k - 2))
            total = subspace_sum(total, left.tensor(relations).tensor(right))
        return total.dim

    def quotient_dimension(self, relations: Subspace, base_dim: int, n: int) -> int:
        """base_dim^n minus the ideal dimension; independent of the kernel path."""
        return base_dim ** n - self.ideal_dimension(relations, base_dim, n)
