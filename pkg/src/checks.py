"""
Structured outcomes of mathematical checks.

A failed check carries a Witness: a concrete input together with the
difference the two sides of the identity produce on it. The context block
names the identity and its parameters so that the witness can be replayed
from a serialized report.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .exactla import RationalMatrix, Vector, format_rational, to_fraction, unit_vector


def serialize_sparse(v: Sequence[Fraction]) -> Dict[str, Any]:
    """Sparse JSON form of a vector: length plus [index, "p/q"] pairs."""
    return {
        "length": len(v),
        "entries": [[i, format_rational(x)] for i, x in enumerate(v) if x],
    }


def parse_sparse(data: Dict[str, Any]) -> Vector:
    out = [Fraction(0)] * int(data["length"])
    for index, value in data["entries"]:
        out[int(index)] = to_fraction(value)
    return tuple(out)


def residual_summary(diff: RationalMatrix) -> str:
    values = sorted({x for i in range(diff.rows) for _, x in diff.nonzero_row(i)})
    shown = ", ".join(format_rational(x) for x in values[:12])
    more = ", ..." if len(values) > 12 else ""
    return f"residual has {diff.nnz()} nonzero entries with values {{{shown}{more}}}"


@dataclass
class Witness:
    """Concrete counterexample: input, the difference it produces, and how to replay it."""

    input: Optional[Vector] = None
    difference: Optional[Vector] = None
    context: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"context": self.context}
        if self.input is not None:
            out["input"] = serialize_sparse(self.input)
        if self.difference is not None:
            out["difference"] = serialize_sparse(self.difference)
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Witness":
        return cls(
            input=parse_sparse(data["input"]) if "input" in data else None,
            difference=parse_sparse(data["difference"]) if "difference" in data else None,
            context=dict(data.get("context", {})),
        )


@dataclass
class CheckReport:
    """Pass/fail result of one check; composite reports aggregate children."""

    name: str
    passed: bool
    residual_norm_zero: bool
    witness: Optional[Witness] = None
    details: str = ""
    data: Dict[str, Any] = field(default_factory=dict)
    children: List["CheckReport"] = field(default_factory=list)
    # advisory checks are reported but do not decide the parent's verdict
    advisory: bool = False

    @classmethod
    def success(cls, name: str, details: str = "", **data: Any) -> "CheckReport":
        return cls(name=name, passed=True, residual_norm_zero=True, details=details, data=data)

    @classmethod
    def failure(cls, name: str, witness: Witness, details: str = "",
                residual_norm_zero: bool = False, **data: Any) -> "CheckReport":
        return cls(name=name, passed=False, residual_norm_zero=residual_norm_zero,
                   witness=witness, details=details, data=data)

    @classmethod
    def combine(cls, name: str, children: List["CheckReport"], details: str = "",
                advisory: Sequence["CheckReport"] = (), **data: Any) -> "CheckReport":
        failed = [c for c in children if not c.passed]
        if not details:
            details = (f"all {len(children)} sub-checks passed" if not failed else
                       "failed: " + ", ".join(c.name for c in failed))
            noted = [c.name for c in advisory if not c.passed]
            if noted:
                details += "; advisory failed: " + ", ".join(noted)
        for report in advisory:
            report.advisory = True
        return cls(
            name=name,
            passed=not failed,
            residual_norm_zero=all(c.residual_norm_zero for c in children),
            witness=failed[0].witness if failed else None,
            details=details,
            data=data,
            children=[*advisory, *children],
        )

    def find(self, name: str) -> Optional["CheckReport"]:
        """Depth-first lookup of a (sub-)check by name."""
        if self.name == name:
            return self
        for child in self.children:
            hit = child.find(name)
            if hit is not None:
                return hit
        return None

    def iter_witnesses(self):
        """Every witness in the tree, children first."""
        for child in self.children:
            yield from child.iter_witnesses()
        if self.witness is not None and not self.children:
            yield self.name, self.witness

    def to_dict(self) -> Dict[str, Any]:
        from .json_output import jsonable

        out: Dict[str, Any] = {
            "name": self.name,
            "passed": self.passed,
            "residual_norm_zero": self.residual_norm_zero,
            "details": self.details,
        }
        if self.advisory:
            out["advisory"] = True
        if self.data:
            out["data"] = jsonable(self.data)
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


def matrix_witness(diff: RationalMatrix, context: Dict[str, Any]) -> Optional[Witness]:
    """Basis vector of the first column on which diff is nonzero, or None."""
    transposed = diff.transpose()
    for col in range(diff.cols):
        if transposed.nonzero_row(col):
            return Witness(input=unit_vector(diff.cols, col),
                           difference=transposed.row(col),
                           context=context)
    return None


def compare_matrices(name: str, lhs: RationalMatrix, rhs: RationalMatrix,
                     context: Dict[str, Any], **data: Any) -> CheckReport:
    """Exact comparison of two operators with a replayable witness on failure."""
    diff = lhs - rhs
    witness = matrix_witness(diff, context)
    if witness is None:
        return CheckReport.success(name, f"identity holds exactly on dimension {lhs.cols}", **data)
    return CheckReport.failure(name, witness, residual_summary(diff), **data)
