"""
Truncated Fock space realization.

Level n is the graded kernel W_n ⊂ H^{⊗n} with the weighted inner product
n!·(δ⊗g)^{⊗n}. Creation by X_{iα} is left multiplication followed by the
orthogonal projection onto W_{n+1}; annihilation is its Gram adjoint. All
operator identities are checked as exact matrix identities on the level
window where both sides are defined.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .checks import CheckReport, Witness, matrix_witness, residual_summary
from .config import Config
from .errors import LevelRangeError, MissingExchangeDataError, ModelValidationError
from .exactla import (
    RationalMatrix,
    Subspace,
    apply_local,
    inverse,
    is_positive_definite,
    leading_principal_minors,
    to_fraction,
)
from .hilbert import HilbertSeriesCalculator
from .statmodel import RelationSet, StatModel

TENSOR_NAMES = ("A", "B", "C", "S", "R")
# A and B multiply P_{iη}Q_{jλ}; a scalar means s·δ^η_α δ^λ_β.
# C, S and R reorder the pair; a scalar means s·δ^η_β δ^λ_α.
_STRAIGHT = ("A", "B")


@dataclass(frozen=True)
class OperatorMatrix:
    """Operator between two levels, in the level bases."""

    from_level: int
    to_level: int
    matrix: RationalMatrix
    label: str = ""


@dataclass(frozen=True)
class ExchangeData:
    """Optional internal tensors, flat k⁴ arrays indexed [η][λ][α][β]."""

    k_dim: int
    A: Optional[Tuple[Fraction, ...]] = None
    B: Optional[Tuple[Fraction, ...]] = None
    C: Optional[Tuple[Fraction, ...]] = None
    S: Optional[Tuple[Fraction, ...]] = None
    R: Optional[Tuple[Fraction, ...]] = None

    @classmethod
    def from_inputs(cls, k_dim: int, **tensors: Any) -> "ExchangeData":
        """Accept a scalar or a flat list of k⁴ entries per tensor."""
        values = {}
        size = k_dim ** 4
        for name, raw in tensors.items():
            if name not in TENSOR_NAMES:
                raise ModelValidationError(f"unknown exchange tensor {name!r}", f"exchange.{name}")
            if raw is None:
                continue
            if isinstance(raw, (list, tuple)):
                if len(raw) != size:
                    raise ModelValidationError(f"needs {size} entries, got {len(raw)}",
                                               f"exchange.{name}")
                values[name] = tuple(to_fraction(x) for x in raw)
            else:
                values[name] = cls._scalar_tensor(name, to_fraction(raw), k_dim)
        return cls(k_dim=k_dim, **values)

    @staticmethod
    def _scalar_tensor(name: str, s: Fraction, k: int) -> Tuple[Fraction, ...]:
        out = []
        for eta, lam, alpha, beta in itertools.product(range(k), repeat=4):
            if name in _STRAIGHT:
                hit = eta == alpha and lam == beta
            else:
                hit = eta == beta and lam == alpha
            out.append(s if hit else Fraction(0))
        return tuple(out)

    def has(self, name: str) -> bool:
        return getattr(self, name) is not None

    def component(self, name: str, eta: int, lam: int, alpha: int, beta: int) -> Fraction:
        k = self.k_dim
        return getattr(self, name)[((eta * k + lam) * k + alpha) * k + beta]

    def to_dict(self) -> Dict[str, List[str]]:
        return {name: [str(x) for x in getattr(self, name)]
                for name in TENSOR_NAMES if self.has(name)}


class FockRealization:
    """Levels 0..n_max with their bases, Grams and lazily built operators."""

    def __init__(self, model: StatModel, rs: RelationSet, levels: Sequence[Subspace]):
        self.model = model
        self.rs = rs
        self.n_max = len(levels) - 1
        self.bases = [level.basis for level in levels]
        self._gram_applied = [self._apply_gram_rows(basis, n) for n, basis in enumerate(self.bases)]
        self._raw = [basis @ gb.transpose() for basis, gb in zip(self.bases, self._gram_applied)]
        self._raw_inverse = [inverse(raw) for raw in self._raw]
        self.grams = [raw.scale(factorial(n)) for n, raw in enumerate(self._raw)]
        self._gram_inverse = [inv.scale(Fraction(1, factorial(n)))
                              for n, inv in enumerate(self._raw_inverse)]
        self._creation: Dict[Tuple[int, int], RationalMatrix] = {}
        self._annihilation: Dict[Tuple[int, int], RationalMatrix] = {}
        self._gl: Dict[Tuple[int, int, int], RationalMatrix] = {}

    def _apply_gram_rows(self, basis: RationalMatrix, n: int) -> RationalMatrix:
        gram = self.model.gram_h
        if gram == RationalMatrix.identity(gram.rows):
            return basis
        rows = []
        for v in basis.row_list():
            for slot in range(n):
                v = apply_local(gram, v, gram.rows, n, slot)
            rows.append(v)
        return RationalMatrix(basis.rows, basis.cols, rows)

    @property
    def level_dims(self) -> List[int]:
        return [basis.rows for basis in self.bases]

    @property
    def total_dim(self) -> int:
        return sum(self.level_dims)

    def identity(self, n: int) -> RationalMatrix:
        return RationalMatrix.identity(self.level_dims[n])

    def zero(self, to_level: int, from_level: int) -> RationalMatrix:
        return RationalMatrix.zeros(self.level_dims[to_level], self.level_dims[from_level])

    def creation(self, a: int, n: int) -> RationalMatrix:
        """Matrix of v ↦ Π_{W_{n+1}}(X_a ⊗ v) from level n to level n+1."""
        if not 0 <= n < self.n_max:
            raise LevelRangeError(f"creation from level {n} needs 0 <= n < {self.n_max}")
        key = (a, n)
        if key not in self._creation:
            block = self.model.h_dim ** n
            gram_applied = self._gram_applied[n + 1]
            columns = gram_applied.submatrix(range(gram_applied.rows), range(a * block, (a + 1) * block))
            self._creation[key] = self._raw_inverse[n + 1] @ columns @ self.bases[n].transpose()
        return self._creation[key]

    def annihilation(self, a: int, n: int) -> RationalMatrix:
        """Gram adjoint of creation, from level n to level n−1."""
        if not 1 <= n <= self.n_max:
            raise LevelRangeError(f"annihilation from level {n} needs 1 <= n <= {self.n_max}")
        key = (a, n)
        if key not in self._annihilation:
            self._annihilation[key] = (self._gram_inverse[n - 1]
                                       @ self.creation(a, n - 1).transpose() @ self.grams[n])
        return self._annihilation[key]

    def creation_annihilation(self, a: int, b: int, n: int) -> RationalMatrix:
        """a†_a a_b on level n; zero on the vacuum."""
        if n == 0:
            return self.zero(0, 0)
        return self.creation(a, n - 1) @ self.annihilation(b, n)

    def annihilation_creation(self, a: int, b: int, n: int) -> RationalMatrix:
        """a_a a†_b on level n (needs n < n_max)."""
        return self.annihilation(a, n + 1) @ self.creation(b, n)

    def gl_generator(self, i: int, j: int, n: int) -> RationalMatrix:
        """J_ij = Σ g^{βα} a†_{iα} a_{jβ} on level n."""
        key = (i, j, n)
        if key not in self._gl:
            model = self.model
            result = self.zero(n, n)
            if n > 0:
                g_inv = model.g_inverse
                for alpha, beta in itertools.product(range(model.k_dim), repeat=2):
                    weight = g_inv[beta, alpha]
                    if weight:
                        term = self.creation_annihilation(model.generator_index(i, alpha),
                                                          model.generator_index(j, beta), n)
                        result = result + term.scale(weight)
            self._gl[key] = result
        return self._gl[key]

    def number_operator(self, n: int) -> RationalMatrix:
        result = self.zero(n, n)
        for i in range(self.model.d):
            result = result + self.gl_generator(i, i, n)
        return result

    def occupation(self, i: int, n: int, row: int) -> int:
        """Mode-i occupation of a (multi-homogeneous) basis vector of level n."""
        D, k = self.model.h_dim, self.model.k_dim
        vector = self.bases[n].row(row)
        index = next(idx for idx, x in enumerate(vector) if x)
        count = 0
        for _ in range(n):
            index, letter = divmod(index, D)
            count += letter // k == i
        return count


WINDOWS = {
    "vacuum_two_point": lambda n_max: range(0, 1),
    "ab_cc": lambda n_max: range(0, n_max - 1),
    "ab_aa": lambda n_max: range(2, n_max + 1),
    "ab_mixed": lambda n_max: range(0, n_max),
    "gld_creation": lambda n_max: range(0, n_max),
    "gld_annihilation": lambda n_max: range(1, n_max + 1),
    "gld_commutator": lambda n_max: range(0, n_max + 1),
    "adjointness": lambda n_max: range(1, n_max + 1),
    "quadratic_kill": lambda n_max: range(0, n_max - 1),
    "number_commutes": lambda n_max: range(0, n_max + 1),
    "number_raises": lambda n_max: range(0, n_max),
    "exchange_c": lambda n_max: range(0, n_max),
    "exchange_s": lambda n_max: range(0, n_max - 1),
    "exchange_r": lambda n_max: range(2, n_max + 1),
}


def identity_residual(fock: FockRealization, key: str, params: Sequence[int], level: int,
                      exchange: Optional[ExchangeData] = None) -> RationalMatrix:
    """lhs − rhs of a named operator identity, as a matrix on `level`."""
    model = fock.model
    idx = model.generator_index
    n = level

    if key == "vacuum_two_point":
        D = model.h_dim
        rows = [[fock.annihilation_creation(a, b, 0)[0, 0] for b in range(D)] for a in range(D)]
        return RationalMatrix(D, D, rows) - model.gram_h

    if key in ("ab_cc", "ab_aa", "ab_mixed"):
        i, alpha, j, beta = params
        return _ab_residual(fock, exchange, key, i, alpha, j, beta, n)

    if key == "gld_creation":
        i, j, k, sigma = params
        c = fock.creation(idx(k, sigma), n)
        residual = fock.gl_generator(i, j, n + 1) @ c - c @ fock.gl_generator(i, j, n)
        if j == k:
            residual = residual - fock.creation(idx(i, sigma), n)
        return residual

    if key == "gld_annihilation":
        i, j, k, sigma = params
        a = fock.annihilation(idx(k, sigma), n)
        residual = fock.gl_generator(i, j, n - 1) @ a - a @ fock.gl_generator(i, j, n)
        if i == k:
            residual = residual + fock.annihilation(idx(j, sigma), n)
        return residual

    if key == "gld_commutator":
        i, j, k, l = params
        left, right = fock.gl_generator(i, j, n), fock.gl_generator(k, l, n)
        residual = left @ right - right @ left
        if j == k:
            residual = residual - fock.gl_generator(i, l, n)
        if i == l:
            residual = residual + fock.gl_generator(k, j, n)
        return residual

    if key == "adjointness":
        (a,) = params
        return (fock.annihilation(a, n).transpose() @ fock.grams[n - 1]
                - fock.grams[n] @ fock.creation(a, n - 1))

    if key == "quadratic_kill":
        (r,) = params
        D = model.h_dim
        relation = fock.rs.r_gen.basis.row(r)
        result = fock.zero(n + 2, n)
        for pair, coeff in enumerate(relation):
            if coeff:
                a, b = divmod(pair, D)
                result = result + (fock.creation(a, n + 1) @ fock.creation(b, n)).scale(coeff)
        return result

    if key == "number_commutes":
        i, j = params
        number, generator = fock.number_operator(n), fock.gl_generator(i, j, n)
        return number @ generator - generator @ number

    if key == "number_raises":
        (a,) = params
        c = fock.creation(a, n)
        return fock.number_operator(n + 1) @ c - c @ fock.number_operator(n) - c

    if key in ("exchange_c", "exchange_s", "exchange_r"):
        i, alpha, j, beta = params
        return _exchange_residual(fock, exchange, key, i, alpha, j, beta, n)

    raise KeyError(f"unknown operator identity {key!r}")


def _pair(fock: FockRealization, first: str, a: int, second: str, b: int, n: int) -> RationalMatrix:
    """first_a ∘ second_b applied to level n, each factor 'cre' or 'ann'."""
    if second == "cre":
        inner, mid = fock.creation(b, n), n + 1
    elif n == 0 and first == "cre":
        return fock.zero(0, 0)
    else:
        inner, mid = fock.annihilation(b, n), n - 1
    if first == "cre":
        return fock.creation(a, mid) @ inner
    return fock.annihilation(a, mid) @ inner


def _ab_residual(fock: FockRealization, ex: Optional[ExchangeData], key: str,
                 i: int, alpha: int, j: int, beta: int, n: int) -> RationalMatrix:
    if ex is None or not (ex.has("A") and ex.has("B")):
        raise MissingExchangeDataError("the (A,B) bracket check needs both A and B tensors")
    model = fock.model
    idx = model.generator_index
    first, second = {"ab_cc": ("cre", "cre"), "ab_aa": ("ann", "ann"), "ab_mixed": ("ann", "cre")}[key]
    to_level = n + (1 if first == "cre" else -1) + (1 if second == "cre" else -1)
    result = RationalMatrix.zeros(fock.level_dims[to_level], fock.level_dims[n])
    for eta, lam in itertools.product(range(model.k_dim), repeat=2):
        a_coeff = ex.component("A", eta, lam, alpha, beta)
        b_coeff = ex.component("B", eta, lam, alpha, beta)
        if not (a_coeff or b_coeff):
            continue
        pq = _pair(fock, first, idx(i, eta), second, idx(j, lam), n)
        qp = _pair(fock, second, idx(j, lam), first, idx(i, eta), n)
        result = result + (pq + qp).scale(a_coeff) + (pq - qp).scale(b_coeff)
    if key == "ab_mixed" and i == j:
        result = result - fock.identity(n).scale(model.g[alpha, beta])
    return result


def _exchange_residual(fock: FockRealization, ex: Optional[ExchangeData], key: str,
                       i: int, alpha: int, j: int, beta: int, n: int) -> RationalMatrix:
    name = key[-1].upper()
    if ex is None or not ex.has(name):
        raise MissingExchangeDataError(f"exchange tensor {name} was not supplied")
    model = fock.model
    idx = model.generator_index
    kind = {"C": ("ann", "cre"), "S": ("cre", "cre"), "R": ("ann", "ann")}[name]
    lhs = _pair(fock, kind[0], idx(i, alpha), kind[1], idx(j, beta), n)
    # C reorders a_i a†_j into a†_j a_i; S and R swap the modes of equal kinds
    swapped = ("cre", "ann") if name == "C" else kind
    rhs = RationalMatrix.zeros(lhs.rows, lhs.cols)
    for eta, lam in itertools.product(range(model.k_dim), repeat=2):
        coeff = ex.component(name, eta, lam, alpha, beta)
        if coeff:
            rhs = rhs + _pair(fock, swapped[0], idx(j, eta), swapped[1], idx(i, lam), n).scale(coeff)
    if name == "C" and i == j:
        rhs = rhs + fock.identity(n).scale(model.g[alpha, beta])
    return lhs - rhs


class FockRealizer:
    """Builds truncated Fock spaces and checks their operator identities."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.hilbert = HilbertSeriesCalculator(config)

    def build_fock(self, model: StatModel, rs: RelationSet, n: int) -> FockRealization:
        levels = self.hilbert.graded_kernels(rs.p_gen, rs.base_dim, n)
        fock = FockRealization(model, rs, [level.space for level in levels])
        self.logger.info(f"Fock levels of {model.name}: {fock.level_dims}")
        return fock

    def creation_matrix(self, fock: FockRealization, i: int, alpha: int, n: int) -> OperatorMatrix:
        a = fock.model.generator_index(i, alpha)
        return OperatorMatrix(n, n + 1, fock.creation(a, n), f"{fock.model.generator_label(a)}+")

    def annihilation_matrix(self, fock: FockRealization, i: int, alpha: int, n: int) -> OperatorMatrix:
        a = fock.model.generator_index(i, alpha)
        return OperatorMatrix(n, n - 1, fock.annihilation(a, n), fock.model.generator_label(a))

    def _run_identity(self, fock: FockRealization, name: str, key: str,
                      param_list: Iterable[Sequence[int]],
                      exchange: Optional[ExchangeData] = None) -> CheckReport:
        window = WINDOWS[key](fock.n_max)
        params_all = [list(p) for p in param_list]
        evaluated = 0
        for level in window:
            for params in params_all:
                residual = identity_residual(fock, key, params, level, exchange)
                evaluated += 1
                context = {"identity": "fock", "key": key, "params": params, "level": level,
                           "n_max": fock.n_max}
                witness = matrix_witness(residual, context)
                if witness is not None:
                    details = (f"{key}{tuple(params)} fails on level {level}: "
                               f"{residual_summary(residual)}")
                    self.logger.warning(f"{name}: {details}")
                    return CheckReport.failure(name, witness, details, level=level,
                                               params=params, evaluated=evaluated)
        levels = f"{window.start}..{window.stop - 1}" if len(window) else "none"
        return CheckReport.success(name, f"{evaluated} identities hold on levels {levels}",
                                   evaluated=evaluated, levels=levels)

    def vacuum_two_point(self, fock: FockRealization) -> CheckReport:
        """⟨0| a_{iα} a†_{jβ} |0⟩ = g_{αβ} δ_ij."""
        if fock.n_max < 1:
            raise LevelRangeError("the two-point function needs level 1")
        return self._run_identity(fock, "vacuum_two_point", "vacuum_two_point", [[]])

    def check_ab_bracket(self, fock: FockRealization, ex: Optional[ExchangeData]) -> CheckReport:
        """Creator-creator, annihilator-annihilator and mixed (A,B) brackets."""
        if ex is None or not (ex.has("A") and ex.has("B")):
            raise MissingExchangeDataError("the (A,B) bracket check needs both A and B tensors")
        params = list(itertools.product(range(fock.model.d), range(fock.model.k_dim),
                                        range(fock.model.d), range(fock.model.k_dim)))
        params = [[i, alpha, j, beta] for i, alpha, j, beta in params]
        children = [self._run_identity(fock, f"ab_bracket_{kind}", f"ab_{kind}", params, ex)
                    for kind in ("cc", "aa", "mixed")]
        return CheckReport.combine("ab_bracket", children)

    def gld_generators(self, fock: FockRealization) -> List[OperatorMatrix]:
        """J_ij on every level, ordered by (i, j, level)."""
        out = []
        for i, j in itertools.product(range(fock.model.d), repeat=2):
            for n in range(fock.n_max + 1):
                out.append(OperatorMatrix(n, n, fock.gl_generator(i, j, n), f"J[{i + 1},{j + 1}]"))
        return out

    def check_gld(self, fock: FockRealization, js: Optional[List[OperatorMatrix]] = None) -> CheckReport:
        """Action on creators, on annihilators, and the gl(d) commutators."""
        d, k = fock.model.d, fock.model.k_dim
        action = [[i, j, m, s] for i, j, m, s in itertools.product(range(d), range(d), range(d), range(k))]
        commutators = [list(p) for p in itertools.product(range(d), repeat=4)]
        children = [
            self._run_identity(fock, "gld_creators", "gld_creation", action),
            self._run_identity(fock, "gld_annihilators", "gld_annihilation", action),
            self._run_identity(fock, "gld_commutators", "gld_commutator", commutators),
        ]
        return CheckReport.combine("gld", children)

    def check_adjointness(self, fock: FockRealization) -> CheckReport:
        return self._run_identity(fock, "adjointness", "adjointness",
                                  [[a] for a in range(fock.model.h_dim)])

    def check_quadratic_kill(self, fock: FockRealization) -> CheckReport:
        """Every relation vector, used as a creator composite, is the zero map."""
        return self._run_identity(fock, "quadratic_kill", "quadratic_kill",
                                  [[r] for r in range(fock.rs.r_gen.dim)])

    def check_level_positivity(self, fock: FockRealization) -> CheckReport:
        for n, gram in enumerate(fock.grams):
            if gram.rows and not is_positive_definite(gram):
                minors = leading_principal_minors(gram)
                witness = Witness(context={"identity": "level_positivity", "level": n, "n_max": fock.n_max,
                                           "minors": [str(m) for m in minors]})
                return CheckReport.failure("level_positivity", witness,
                                           f"level {n} Gram is not positive definite")
        return CheckReport.success("level_positivity",
                                   f"all {fock.n_max + 1} level Grams are positive definite")

    def number_operator_report(self, fock: FockRealization) -> CheckReport:
        """N = Σ J_ii: scalar on levels, commutes with J, raised by creators."""
        scalar_levels = {}
        for n in range(fock.n_max + 1):
            scalar_levels[str(n)] = fock.number_operator(n) == fock.identity(n).scale(n)
        d = fock.model.d
        children = [self._run_identity(fock, "number_commutes", "number_commutes",
                                       [list(p) for p in itertools.product(range(d), repeat=2)])]
        if all(scalar_levels.values()):
            children.append(self._run_identity(fock, "number_raises", "number_raises",
                                               [[a] for a in range(fock.model.h_dim)]))
        traces = {f"J[{i + 1},{i + 1}]": [str(fock.gl_generator(i, i, n).trace())
                                         for n in range(fock.n_max + 1)]
                  for i in range(d)}
        occupations = {f"J[{i + 1},{i + 1}]": [sum(fock.occupation(i, n, r) for r in range(fock.level_dims[n]))
                                              for n in range(fock.n_max + 1)]
                       for i in range(d)}
        return CheckReport.combine("number_operator", children, scalar_on_levels=scalar_levels,
                                   traces=traces, occupation_sums=occupations)

    def check_exchange_tensors(self, fock: FockRealization, ex: ExchangeData) -> CheckReport:
        """Validate the supplied C, S, R tensors against the realized operators."""
        d, k = fock.model.d, fock.model.k_dim
        children = []
        for name in ("C", "S", "R"):
            if not ex.has(name):
                continue
            params = [[i, alpha, j, beta]
                      for i, alpha, j, beta in itertools.product(range(d), range(k), range(d), range(k))
                      if name == "C" or i != j]
            children.append(self._run_identity(fock, f"exchange_{name}", f"exchange_{name.lower()}",
                                               params, ex))
        if ex.has("C") and ex.has("S"):
            children.append(self.check_exchange_adjointness(fock.model, ex))
        return CheckReport.combine("exchange_tensors", children)

    def check_exchange_adjointness(self, model: StatModel, ex: ExchangeData) -> CheckReport:
        """Σ_β g^{βα} C^{γδ}_{βσ} = Σ_η S^{γα}_{ση} g_{δη}, componentwise."""
        k = model.k_dim
        g, g_inv = model.g, model.g_inverse
        for alpha, gamma, delta, sigma in itertools.product(range(k), repeat=4):
            lhs = sum((g_inv[beta, alpha] * ex.component("C", gamma, delta, beta, sigma)
                       for beta in range(k)), Fraction(0))
            rhs = sum((ex.component("S", gamma, alpha, sigma, eta) * g[delta, eta]
                       for eta in range(k)), Fraction(0))
            if lhs != rhs:
                witness = Witness(context={"identity": "exchange_adjointness",
                                           "indices": [alpha, gamma, delta, sigma],
                                           "lhs": str(lhs), "rhs": str(rhs)})
                return CheckReport.failure(
                    "exchange_adjointness", witness,
                    f"component (α,γ,δ,σ)=({alpha},{gamma},{delta},{sigma}): {lhs} != {rhs}")
        return CheckReport.success("exchange_adjointness", f"all {k ** 4} components agree")
