"""
Exact rational dense linear algebra.

Every scalar is a ``fractions.Fraction``; matrices are immutable row-major
tuples. Subspaces are stored by the reduced row echelon form of a basis, so
two subspaces are equal exactly when their basis matrices are identical.
Multiplication and elimination skip zero entries, which keeps the Kronecker
lifts used for tensor powers cheap.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import DegeneratePairingError, DimensionMismatchError

Scalar = Union[int, Fraction, str]
Vector = Tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value: Scalar) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational entries")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational entry")


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" for integers)."""
    return str(value)


def as_vector(values: Iterable[Scalar]) -> Vector:
    return tuple(to_fraction(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, k: int) -> Vector:
    return tuple(ONE if i == k else ZERO for i in range(n))


def is_zero_vector(v: Sequence[Fraction]) -> bool:
    return not any(v)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def add_vectors(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub_vectors(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale_vector(s: Fraction, v: Sequence[Fraction]) -> Vector:
    return tuple(s * a for a in v)


def kron_vectors(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a * b for a in u for b in v)


class RationalMatrix:
    """Dense matrix with exact rational entries; immutable after construction."""

    __slots__ = ("_rows", "_cols", "_data", "_nonzero")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[Scalar]]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(data) != rows:
            raise DimensionMismatchError(f"expected {rows} rows, got {len(data)}")
        packed = []
        for i, row in enumerate(data):
            if len(row) != cols:
                raise DimensionMismatchError(f"row {i} has {len(row)} entries, expected {cols}")
            packed.append(tuple(to_fraction(x) for x in row))
        self._rows = rows
        self._cols = cols
        self._data = tuple(packed)
        self._nonzero: Optional[Tuple[Tuple[Tuple[int, Fraction], ...], ...]] = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], cols: Optional[int] = None) -> "RationalMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], rows: int) -> "RationalMatrix":
        return cls(rows, len(columns), [[col[i] for col in columns] for i in range(rows)])

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence[Scalar]) -> "RationalMatrix":
        if len(entries) != rows * cols:
            raise DimensionMismatchError(f"expected {rows * cols} entries, got {len(entries)}")
        return cls(rows, cols, [entries[i * cols:(i + 1) * cols] for i in range(rows)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, [(ZERO,) * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, [unit_vector(n, i) for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence[Scalar]) -> "RationalMatrix":
        n = len(values)
        return cls(n, n, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def outer(cls, u: Sequence[Scalar], v: Sequence[Scalar]) -> "RationalMatrix":
        u, v = as_vector(u), as_vector(v)
        return cls(len(u), len(v), [[a * b for b in v] for a in u])

    # -- access -------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> Tuple[int, int]:
        return (self._rows, self._cols)

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._data)

    def row_list(self) -> List[Vector]:
        return list(self._data)

    def to_lists(self) -> List[List[Fraction]]:
        return [list(r) for r in self._data]

    def nonzero_row(self, i: int) -> Tuple[Tuple[int, Fraction], ...]:
        """Nonzero (column, value) pairs of row i."""
        if self._nonzero is None:
            self._nonzero = tuple(tuple((j, x) for j, x in enumerate(r) if x) for r in self._data)
        return self._nonzero[i]

    def nnz(self) -> int:
        return sum(len(self.nonzero_row(i)) for i in range(self._rows))

    # -- algebra ------------------------------------------------------------

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self._cols, self._rows,
                              [self.column(j) for j in range(self._cols)])

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape {self.shape} does not match {other.shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(self._rows, self._cols,
                              [add_vectors(a, b) for a, b in zip(self._data, other._data)])

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(self._rows, self._cols,
                              [sub_vectors(a, b) for a, b in zip(self._data, other._data)])

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-ONE)

    def scale(self, s: Scalar) -> "RationalMatrix":
        s = to_fraction(s)
        return RationalMatrix(self._rows, self._cols, [scale_vector(s, r) for r in self._data])

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self._cols != other._rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self._rows):
            acc: Dict[int, Fraction] = {}
            for k, a in self.nonzero_row(i):
                for j, b in other.nonzero_row(k):
                    acc[j] = acc.get(j, ZERO) + a * b
            out.append([acc.get(j, ZERO) for j in range(other._cols)])
        return RationalMatrix(self._rows, other._cols, out)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        """Matrix-vector product."""
        if len(v) != self._cols:
            raise DimensionMismatchError(f"vector of length {len(v)} for matrix {self.shape}")
        return tuple(sum((x * v[j] for j, x in self.nonzero_row(i) if v[j]), ZERO)
                     for i in range(self._rows))

    def is_zero(self) -> bool:
        return all(not any(r) for r in self._data)

    def is_square(self) -> bool:
        return self._rows == self._cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(self._data[i][j] == self._data[j][i]
                                        for i in range(self._rows) for j in range(i))

    def trace(self) -> Fraction:
        return sum((self._data[i][i] for i in range(min(self.shape))), ZERO)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(len(rows), len(cols), [[self._data[i][j] for j in cols] for i in rows])

    def permuted(self, perm: Sequence[int]) -> "RationalMatrix":
        """Conjugate by the index map old -> perm[old]: result[perm[r], perm[c]] = self[r, c]."""
        n = self._rows
        out = [[ZERO] * n for _ in range(n)]
        for r in range(n):
            for c, x in self.nonzero_row(r):
                out[perm[r]][perm[c]] = x
        return RationalMatrix(n, n, out)

    def flat(self) -> List[Fraction]:
        return [x for r in self._data for x in r]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self._rows, self._cols, self._data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self._data[:6])
        more = " ..." if self._rows > 6 else ""
        return f"RationalMatrix({self._rows}x{self._cols}: [{body}{more}])"


def vstack(matrices: Sequence[RationalMatrix], cols: Optional[int] = None) -> RationalMatrix:
    """Stack matrices vertically; `cols` is required when the list may be empty."""
    if cols is None:
        cols = matrices[0].cols
    rows: List[Vector] = []
    for m in matrices:
        if m.cols != cols:
            raise DimensionMismatchError(f"cannot stack a {m.shape} block onto {cols} columns")
        rows.extend(m.row_list())
    return RationalMatrix(len(rows), cols, rows)


# -- elimination ------------------------------------------------------------

def _rref_rows(rows: List[List[Fraction]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    pivots: List[int] = []
    nrows = len(rows)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        lead = prow[c]
        if lead != ONE:
            prow = [x / lead if x else ZERO for x in prow]
            rows[r] = prow
        support = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i == r:
                continue
            row_i = rows[i]
            f = row_i[c]
            if f:
                for j in support:
                    row_i[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: RationalMatrix) -> Tuple[RationalMatrix, List[int]]:
    """Reduced row echelon form and pivot columns; rank = len(pivots)."""
    rows, pivots = _rref_rows(m.to_lists(), m.cols)
    return RationalMatrix(m.rows, m.cols, rows), pivots


def rank(m: RationalMatrix) -> int:
    return len(rref(m)[1])


def kernel(m: RationalMatrix) -> "Subspace":
    """Canonical basis of the null space {v : m v = 0}."""
    n = m.cols
    if m.rows == 0:
        return Subspace.full(n)
    reduced, pivots = _rref_rows(m.to_lists(), n)
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(v)
    return Subspace.span(basis, n)


def inverse(m: RationalMatrix) -> RationalMatrix:
    if not m.is_square():
        raise DimensionMismatchError(f"cannot invert a {m.shape} matrix")
    n = m.rows
    augmented = [list(r) + list(unit_vector(n, i)) for i, r in enumerate(m.row_list())]
    reduced, pivots = _rref_rows(augmented, 2 * n)
    if pivots[:n] != list(range(n)):
        raise DegeneratePairingError("matrix is singular")
    return RationalMatrix(n, n, [r[n:] for r in reduced])


def determinant(m: RationalMatrix) -> Fraction:
    if not m.is_square():
        raise DimensionMismatchError(f"determinant of a {m.shape} matrix")
    rows = m.to_lists()
    n = m.rows
    det = ONE
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c]), None)
        if pivot is None:
            return ZERO
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        lead = rows[c][c]
        det *= lead
        for i in range(c + 1, n):
            f = rows[i][c] / lead
            if f:
                for j in range(c, n):
                    rows[i][j] -= f * rows[c][j]
    return det


def leading_principal_minors(m: RationalMatrix) -> List[Fraction]:
    return [determinant(m.submatrix(range(k), range(k))) for k in range(1, m.rows + 1)]


def is_positive_definite(m: RationalMatrix) -> bool:
    """Sylvester's criterion on a symmetric matrix."""
    return m.is_symmetric() and all(x > 0 for x in leading_principal_minors(m))


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^n stored by its reduced row echelon basis."""

    ambient_dim: int
    basis: RationalMatrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence[Scalar]], ambient_dim: int) -> "Subspace":
        rows = [[to_fraction(x) for x in v] for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise DimensionMismatchError(f"vector of length {len(v)} in ambient {ambient_dim}")
        if not rows:
            return cls.zero(ambient_dim)
        reduced, pivots = _rref_rows(rows, ambient_dim)
        return cls(ambient_dim, RationalMatrix(len(pivots), ambient_dim, reduced[:len(pivots)]))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, RationalMatrix(0, n, []))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, RationalMatrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> List[Vector]:
        return self.basis.row_list()

    def pivots(self) -> List[int]:
        return [next(j for j, x in enumerate(r) if x) for r in self.basis.row_list()]

    def contains(self, v: Sequence[Fraction]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError(f"vector of length {len(v)} in ambient {self.ambient_dim}")
        residual = list(v)
        for p, row in zip(self.pivots(), self.basis.row_list()):
            f = residual[p]
            if f:
                for j, x in enumerate(row):
                    if x:
                        residual[j] -= f * x
        return not any(residual)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.vectors())

    def tensor(self, other: "Subspace") -> "Subspace":
        """self ⊗ other; the Kronecker product of two echelon bases is again echelon."""
        rows = [kron_vectors(a, b) for a in self.vectors() for b in other.vectors()]
        n = self.ambient_dim * other.ambient_dim
        return Subspace(n, RationalMatrix(len(rows), n, rows))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"subspaces live in dimensions {a.ambient_dim} and {b.ambient_dim}")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return Subspace.span(a.vectors() + b.vectors(), a.ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """a ∩ b as the annihilator of ann(a) + ann(b) under the standard pairing."""
    _check_ambient(a, b)
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n)
    if a.dim == n:
        return b
    if b.dim == n:
        return a
    dual = subspace_sum(kernel(a.basis), kernel(b.basis))
    if dual.dim == 0:
        return Subspace.full(n)
    return kernel(dual.basis)


def image(m: RationalMatrix) -> Subspace:
    """Column space of m."""
    return Subspace.span(m.transpose().row_list(), m.rows)


def annihilator(s: Subspace, pairing: RationalMatrix) -> Subspace:
    """{φ : φᵀ·pairing·v = 0 for all v in s}."""
    n = s.ambient_dim
    if pairing.shape != (n, n):
        raise DimensionMismatchError(f"pairing of shape {pairing.shape} for ambient {n}")
    if rank(pairing) != n:
        raise DegeneratePairingError("pairing is degenerate")
    if s.dim == 0:
        return Subspace.full(n)
    return kernel(s.basis @ pairing.transpose())


def restricted_kernel(vectors: Sequence[Vector], images: Sequence[Vector], ambient_dim: int) -> Subspace:
    """Span of the combinations Σ c_j vectors[j] whose image Σ c_j images[j] vanishes."""
    if not vectors:
        return Subspace.zero(ambient_dim)
    m = len(vectors)
    target = len(images[0])
    system = RationalMatrix(target, m, [[images[j][i] for j in range(m)] for i in range(target)])
    coefficients = kernel(system)
    combos = []
    for c in coefficients.vectors():
        acc = [ZERO] * ambient_dim
        for cj, v in zip(c, vectors):
            if cj:
                for idx, x in enumerate(v):
                    if x:
                        acc[idx] += cj * x
        combos.append(acc)
    return Subspace.span(combos, ambient_dim)


# -- tensor products ---------------------------------------------------------

def kron(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Kronecker product; index (i, α) ↦ i·dim(b) + α."""
    rows = []
    for i in range(a.rows):
        arow = a.row(i)
        for k in range(b.rows):
            brow = b.row(k)
            rows.append([x * y if x and y else ZERO for x in arow for y in brow])
    return RationalMatrix(a.rows * b.rows, a.cols * b.cols, rows)


def kron_power(m: RationalMatrix, n: int) -> RationalMatrix:
    result = RationalMatrix.identity(1)
    for _ in range(n):
        result = kron(result, m)
    return result


def local_operator(op: RationalMatrix, base_dim: int, degree: int, position: int) -> RationalMatrix:
    """id^{⊗position} ⊗ op ⊗ id^{⊗rest} on the degree-th tensor power."""
    width = _width(op, base_dim)
    left = RationalMatrix.identity(base_dim ** position)
    right = RationalMatrix.identity(base_dim ** (degree - position - width))
    return kron(kron(left, op), right)


def _width(op: RationalMatrix, base_dim: int) -> int:
    width, size = 0, 1
    while size < op.rows:
        size *= base_dim
        width += 1
    if size != op.rows or not op.is_square():
        raise DimensionMismatchError(f"operator of shape {op.shape} is not a power of {base_dim}")
    return width


def apply_local(op: RationalMatrix, v: Sequence[Fraction], base_dim: int,
                degree: int, position: int) -> Vector:
    """Apply op to tensor slots position, position+1, ... of a degree-fold tensor."""
    width = _width(op, base_dim)
    if position < 0 or position + width > degree:
        raise DimensionMismatchError(f"slots {position}..{position + width - 1} outside degree {degree}")
    if len(v) != base_dim ** degree:
        raise DimensionMismatchError(f"vector of length {len(v)} for degree {degree}")
    block = op.rows
    right = base_dim ** (degree - position - width)
    columns = op.transpose()
    out = [ZERO] * len(v)
    for idx, x in enumerate(v):
        if not x:
            continue
        outer_idx, r = divmod(idx, right)
        l, b = divmod(outer_idx, block)
        for a, y in columns.nonzero_row(b):
            out[(l * block + a) * right + r] += y * x
    return tuple(out)


# -- projectors --------------------------------------------------------------

def is_projector(p: RationalMatrix, gram: RationalMatrix) -> bool:
    """p² = p and p self-adjoint with respect to gram."""
    if not p.is_square() or gram.shape != p.shape:
        raise DimensionMismatchError(f"projector {p.shape} against gram {gram.shape}")
    return p @ p == p and gram @ p == p.transpose() @ gram


def orthogonal_projector(s: Subspace, gram: RationalMatrix) -> RationalMatrix:
    """gram-orthogonal projector onto s: v ↦ Bᵀ (B G Bᵀ)⁻¹ B G v."""
    n = s.ambient_dim
    if gram.shape != (n, n):
        raise DimensionMismatchError(f"gram of shape {gram.shape} for ambient {n}")
    if s.dim == 0:
        return RationalMatrix.zeros(n, n)
    b = s.basis
    bg = b @ gram
    return b.transpose() @ inverse(bg @ b.transpose()) @ bg
