"""
Statistics species and their quadratic relation data.

Generators X_{iα} = e_i ⊗ k_α are indexed flat as i·k_dim + α (0-based).
A pair X_{iα} ⊗ X_{jβ} sits at (i·k_dim + α)·D + (j·k_dim + β) with
D = d·k_dim. The relation projector is assembled in block order
(e_i ⊗ e_j) ⊗ (k_α ⊗ k_β) and then moved to this generator order.
"""

import itertools
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .checks import CheckReport, compare_matrices
from .errors import ModelValidationError
from .exactla import (
    RationalMatrix,
    Subspace,
    Vector,
    determinant,
    image,
    inverse,
    is_projector,
    kernel,
    kron,
    kron_vectors,
    orthogonal_projector,
    unit_vector,
)

logger = logging.getLogger(__name__)

PRESET_NAMES = ("boson", "fermion", "singlet_pair", "singlet_pair_completed")
PRESET_ALIASES = {"example_sec5": "singlet_pair"}

# Rational rotation used to complete the singlet-pair example across modes.
SINGLET_EXCHANGE_ROTATION = (
    (Fraction(2, 3), Fraction(-1, 3), Fraction(2, 3)),
    (Fraction(2, 3), Fraction(2, 3), Fraction(-1, 3)),
    (Fraction(-1, 3), Fraction(2, 3), Fraction(2, 3)),
)


@dataclass(frozen=True)
class StatModel:
    """Full declaration of a statistics species."""

    d: int
    k_dim: int
    g: RationalMatrix
    w_sym: Subspace
    w_ext: Subspace
    # generator flat indices from smallest to largest; empty means lexicographic
    order: Tuple[int, ...] = ()
    n_max: int = 4
    name: str = "model"

    def __post_init__(self):
        if self.d < 1:
            raise ModelValidationError(f"must be at least 1, got {self.d}", "model.d")
        if self.k_dim < 1:
            raise ModelValidationError(f"must be at least 1, got {self.k_dim}", "model.k_dim")
        if self.n_max < 2:
            raise ModelValidationError(f"must be at least 2, got {self.n_max}", "model.n_max")
        self._validate_form()
        square = self.k_dim ** 2
        for label, space in (("w_sym", self.w_sym), ("w_ext", self.w_ext)):
            if space.ambient_dim != square:
                raise ModelValidationError(
                    f"lives in dimension {space.ambient_dim}, expected k_dim² = {square}",
                    f"model.{label}")
        if not self.order:
            object.__setattr__(self, "order", tuple(range(self.h_dim)))
        elif sorted(self.order) != list(range(self.h_dim)):
            raise ModelValidationError(
                f"must be a permutation of 0..{self.h_dim - 1}", "model.order")

    def _validate_form(self) -> None:
        g, k = self.g, self.k_dim
        if g.shape != (k, k):
            raise ModelValidationError(f"has shape {g.shape}, expected ({k}, {k})", "model.g")
        for a in range(k):
            for b in range(a):
                if g[a, b] != g[b, a]:
                    raise ModelValidationError(
                        f"not symmetric: g[{b + 1},{a + 1}] = {g[b, a]} but "
                        f"g[{a + 1},{b + 1}] = {g[a, b]}", "model.g")
        for size in range(1, k + 1):
            minor = determinant(g.submatrix(range(size), range(size)))
            if minor <= 0:
                raise ModelValidationError(
                    f"not positive definite: leading minor of order {size} is {minor}", "model.g")

    # -- derived data -------------------------------------------------------

    @property
    def h_dim(self) -> int:
        """D = d·k_dim, the number of generators."""
        return self.d * self.k_dim

    @property
    def pair_dim(self) -> int:
        return self.h_dim ** 2

    @property
    def gram_h(self) -> RationalMatrix:
        """δ ⊗ g on H in generator order."""
        return kron(RationalMatrix.identity(self.d), self.g)

    @property
    def gram_pair(self) -> RationalMatrix:
        gh = self.gram_h
        return kron(gh, gh)

    @property
    def gram_internal(self) -> RationalMatrix:
        """g ⊗ g on K⊗K."""
        return kron(self.g, self.g)

    @property
    def g_inverse(self) -> RationalMatrix:
        return inverse(self.g)

    def generator_index(self, i: int, alpha: int) -> int:
        return i * self.k_dim + alpha

    def generator_label(self, index: int) -> str:
        i, alpha = divmod(index, self.k_dim)
        if self.d == 1:
            return f"X{alpha + 1}" if self.k_dim > 1 else "X"
        if self.k_dim == 1:
            return f"X{i + 1}"
        return f"X[{i + 1},{alpha + 1}]"

    def word_label(self, word: Sequence[int]) -> str:
        return "".join(self.generator_label(x) for x in word)

    def rank_of(self) -> Dict[int, int]:
        """Position of each generator in the declared order."""
        return {index: position for position, index in enumerate(self.order)}

    def single_mode(self) -> "StatModel":
        """The d = 1 specialization; only the symmetric external sector survives."""
        if self.d == 1:
            return self
        order = tuple(index for index in self.order if index < self.k_dim)
        return replace(self, d=1, w_ext=Subspace.zero(self.k_dim ** 2), order=order,
                       name=f"{self.name}/single")

    def with_w_ext(self, w_ext: Subspace) -> "StatModel":
        return replace(self, w_ext=w_ext)

    def with_d(self, d: int) -> "StatModel":
        return replace(self, d=d, order=())


@dataclass(frozen=True)
class RelationSet:
    """Assembled quadratic relation data on H⊗H."""

    ambient: int
    base_dim: int
    p_gen: RationalMatrix
    p_gen_perp: RationalMatrix
    r_gen: Subspace
    vectors: Tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return self.r_gen.dim


def swap_matrix(n: int) -> RationalMatrix:
    """Exchange of tensor factors on C^n ⊗ C^n."""
    rows = [[0] * (n * n) for _ in range(n * n)]
    for i in range(n):
        for j in range(n):
            rows[j * n + i][i * n + j] = 1
    return RationalMatrix(n * n, n * n, rows)


def external_projectors(d: int) -> Tuple[RationalMatrix, RationalMatrix]:
    """(P_sym, P_ext) = ((I + SWAP)/2, (I − SWAP)/2) on C^d ⊗ C^d."""
    if d < 1:
        raise ModelValidationError(f"must be at least 1, got {d}", "d")
    identity = RationalMatrix.identity(d * d)
    swap = swap_matrix(d)
    half = Fraction(1, 2)
    return (identity + swap).scale(half), (identity - swap).scale(half)


def internal_projectors(model: StatModel) -> Tuple[RationalMatrix, RationalMatrix]:
    """g-orthogonal projectors onto W_sym and W_ext (Gram g⊗g)."""
    gram = model.gram_internal
    return orthogonal_projector(model.w_sym, gram), orthogonal_projector(model.w_ext, gram)


def block_to_generator(d: int, k_dim: int) -> List[int]:
    """perm[(i·d+j)·k² + α·k+β] = (i·k+α)·D + (j·k+β)."""
    D = d * k_dim
    perm = [0] * (D * D)
    for i, j, alpha, beta in itertools.product(range(d), range(d), range(k_dim), range(k_dim)):
        block = (i * d + j) * k_dim ** 2 + alpha * k_dim + beta
        perm[block] = (i * k_dim + alpha) * D + (j * k_dim + beta)
    return perm


def lift_block_vector(external: Sequence[Fraction], internal: Sequence[Fraction],
                      d: int, k_dim: int) -> Vector:
    """external ⊗ internal moved from block order to generator order."""
    block = kron_vectors(external, internal)
    out = [Fraction(0)] * len(block)
    for source, target in enumerate(block_to_generator(d, k_dim)):
        out[target] = block[source]
    return tuple(out)


def assemble_pgen(model: StatModel) -> RelationSet:
    """P_gen = P_sym ⊗ P^K_sym + P_ext ⊗ P^K_ext, reindexed to generator order."""
    d, k = model.d, model.k_dim
    logger.debug(f"Assembling relation projector for {model.name} (d={d}, k_dim={k})")
    ext_sym, ext_ext = external_projectors(d)
    int_sym, int_ext = internal_projectors(model)
    block = kron(ext_sym, int_sym) + kron(ext_ext, int_ext)
    p_gen = block.permuted(block_to_generator(d, k))

    if not is_projector(p_gen, model.gram_pair):
        raise ModelValidationError("assembled relation projector is not a self-adjoint idempotent")
    r_gen = image(p_gen)
    expected = d * (d + 1) // 2 * model.w_sym.dim + d * (d - 1) // 2 * model.w_ext.dim
    if r_gen.dim != expected:
        raise ModelValidationError(
            f"relation projector has rank {r_gen.dim}, expected {expected}")

    identity = RationalMatrix.identity(model.pair_dim)
    columns = p_gen.transpose()
    logger.info(f"Relation space of {model.name}: rank {r_gen.dim} in dimension {model.pair_dim}")
    return RelationSet(
        ambient=model.pair_dim,
        base_dim=model.h_dim,
        p_gen=p_gen,
        p_gen_perp=identity - p_gen,
        r_gen=r_gen,
        vectors=tuple(columns.row_list()),
    )


def relation_vectors(rs: RelationSet, model: StatModel) -> List[Vector]:
    """r^{αβ}_{ij} = P_gen(X_{iα} ⊗ X_{jβ}), ordered by (i, j, α, β)."""
    return [relation_vector(rs, model, i, j, alpha, beta)
            for i, j, alpha, beta in itertools.product(
                range(model.d), range(model.d), range(model.k_dim), range(model.k_dim))]


def relation_vector(rs: RelationSet, model: StatModel, i: int, j: int,
                    alpha: int, beta: int) -> Vector:
    D = model.h_dim
    return rs.vectors[model.generator_index(i, alpha) * D + model.generator_index(j, beta)]


def _pullback(relations: Subspace, embedding: RationalMatrix) -> Subspace:
    """{u : embedding·u ∈ relations}."""
    constraints = kernel(relations.basis) if relations.dim else Subspace.full(relations.ambient_dim)
    if constraints.dim == 0:
        return Subspace.full(embedding.cols)
    return kernel(constraints.basis @ embedding)


def decompose_relations(relations: Subspace, d: int, k_dim: int) -> Tuple[Subspace, Subspace]:
    """Split a U(d)-invariant relation space into (W_sym, W_ext)."""
    D = d * k_dim
    if relations.ambient_dim != D * D:
        raise ModelValidationError(
            f"relations live in dimension {relations.ambient_dim}, expected {D * D}",
            "model.relations")
    square = k_dim ** 2
    diagonal = [unit_vector(d * d, 0)]
    sym_embedding = RationalMatrix.from_columns(
        [lift_block_vector(diagonal[0], unit_vector(square, c), d, k_dim) for c in range(square)],
        D * D)
    w_sym = _pullback(relations, sym_embedding)

    if d == 1:
        w_ext = Subspace.zero(square)
        ext_vectors: List[Vector] = []
    else:
        wedge = [Fraction(0)] * (d * d)
        wedge[1], wedge[d] = Fraction(1), Fraction(-1)
        ext_embedding = RationalMatrix.from_columns(
            [lift_block_vector(wedge, unit_vector(square, c), d, k_dim) for c in range(square)],
            D * D)
        w_ext = _pullback(relations, ext_embedding)

    ext_sym, ext_ext = external_projectors(d)
    rebuilt = []
    for sector, space in ((image(ext_sym), w_sym), (image(ext_ext), w_ext)):
        for e in sector.vectors():
            for u in space.vectors():
                rebuilt.append(lift_block_vector(e, u, d, k_dim))
    rebuilt_space = Subspace.span(rebuilt, D * D)
    if rebuilt_space != relations:
        raise ModelValidationError(
            "relations are not U(d)-invariant: they differ from Sym²⊗W_sym ⊕ ∧²⊗W_ext",
            "model.relations")
    return w_sym, w_ext


def _singlet_vector(k_dim: int) -> Vector:
    return tuple(Fraction(1) if a == b else Fraction(0)
                 for a in range(k_dim) for b in range(k_dim))


def singlet_exchange_vector() -> Vector:
    """w = Σ O_{αβ} k_α ⊗ k_β for the completion rotation O."""
    return tuple(x for row in SINGLET_EXCHANGE_ROTATION for x in row)


def preset(name: str, d: Optional[int] = None, w_ext: Optional[Subspace] = None) -> StatModel:
    """Built-in species: boson, fermion, singlet_pair (alias example_sec5), singlet_pair_completed."""
    name = PRESET_ALIASES.get(name, name)
    d = 2 if d is None else d
    if name == "boson":
        model = StatModel(d=d, k_dim=1, g=RationalMatrix.identity(1),
                          w_sym=Subspace.zero(1), w_ext=Subspace.full(1),
                          n_max=6, name=f"boson.d{d}")
    elif name == "fermion":
        model = StatModel(d=d, k_dim=1, g=RationalMatrix.identity(1),
                          w_sym=Subspace.full(1), w_ext=Subspace.zero(1),
                          n_max=6, name=f"fermion.d{d}")
    elif name in ("singlet_pair", "singlet_pair_completed"):
        h = _singlet_vector(3)
        w_sym = kernel(RationalMatrix.from_rows([h]))
        if name == "singlet_pair_completed":
            default_ext = Subspace.span([singlet_exchange_vector()], 9)
        else:
            default_ext = Subspace.zero(9)
        model = StatModel(d=d, k_dim=3, g=RationalMatrix.identity(3), w_sym=w_sym,
                          w_ext=default_ext, n_max=4, name=f"{name}.d{d}")
    else:
        raise ModelValidationError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}", "preset")
    if w_ext is not None:
        model = model.with_w_ext(w_ext)
    return model


def signed_permutations(d: int):
    """Deterministic enumeration of the d×d signed permutation matrices."""
    for perm in itertools.permutations(range(d)):
        for signs in itertools.product((1, -1), repeat=d):
            rows = [[0] * d for _ in range(d)]
            for r, c in enumerate(perm):
                rows[r][c] = signs[r]
            yield perm, signs, RationalMatrix(d, d, rows)


def equivariance_operator(model: StatModel, u: RationalMatrix) -> RationalMatrix:
    """(u⊗I_K) ⊗ (u⊗I_K) on H⊗H."""
    one = kron(u, RationalMatrix.identity(model.k_dim))
    return kron(one, one)


def equivariance_difference(rs: RelationSet, model: StatModel, u: RationalMatrix) -> RationalMatrix:
    uu = equivariance_operator(model, u)
    return uu @ rs.p_gen @ uu.transpose() - rs.p_gen


def check_equivariance(rs: RelationSet, model: StatModel, limit: Optional[int] = None) -> CheckReport:
    """Signed-permutation smoke test of U(d)-equivariance."""
    children = []
    for count, (perm, signs, u) in enumerate(signed_permutations(model.d)):
        if limit is not None and count >= limit:
            break
        uu = equivariance_operator(model, u)
        context = {"identity": "equivariance", "perm": list(perm), "signs": list(signs)}
        children.append(compare_matrices(
            f"equivariance[{''.join(str(p) for p in perm)}|{''.join('+' if s > 0 else '-' for s in signs)}]",
            uu @ rs.p_gen @ uu.transpose(), rs.p_gen, context))
    return CheckReport.combine("equivariance", children, samples=len(children))
