"""
Classification of single-mode series into transfermionic and transbosonic types.

A terminating series G is transfermionic when G itself has positive integer
coefficients and only real negative roots. A non-terminating series is
transbosonic when G = 1/Q_+ with Q_+(0) = 1, integer coefficients and only
real positive roots. Root conditions are certified with Sturm sequences of
the square-free factors, so irrational roots never need to be computed.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from .config import Config
from .errors import InsufficientCoefficientsError
from .exactla import RationalMatrix, rref
from .hilbert import SeriesCoeffs, series_multiply

TRANSFERMIONIC = "transfermionic"
TRANSBOSONIC = "transbosonic"
INDETERMINATE = "indeterminate"

SIGNATURE_CONVENTION = "signature lists the coefficients q_0, q_1, ... of the certifying polynomial"

_T = sympy.Symbol("t")


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, constant term first, trailing zeros trimmed."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        trimmed = list(self.coeffs)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        object.__setattr__(self, "coeffs", tuple(int(c) for c in trimmed))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed(self.coeffs)), _T, domain="QQ")

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "IntPoly":
        """Primitive integer representative of a rational polynomial."""
        _, primitive = poly.clear_denoms(convert=True)
        return cls(tuple(int(c) for c in reversed(primitive.all_coeffs())))


@dataclass
class Classification:
    kind: str
    signature: List[int] = field(default_factory=list)
    sign: Optional[str] = None
    certificate: Dict[str, Any] = field(default_factory=dict)
    reason: str = ""

    @property
    def label(self) -> str:
        if self.kind == INDETERMINATE:
            return INDETERMINATE
        return "[" + ",".join(str(c) for c in self.signature) + "]_" + self.sign

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "signature": self.signature,
            "sign": self.sign,
            "label": self.label,
            "convention": SIGNATURE_CONVENTION,
            "certificate": self.certificate,
            "reason": self.reason,
        }


def _sympy_rational(x: Fraction) -> sympy.Rational:
    return sympy.Rational(x.numerator, x.denominator)


def _sign_variations(values: Sequence) -> int:
    nonzero = [v for v in values if v != 0]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if (a > 0) != (b > 0))


def sturm_sequence(p: IntPoly) -> List[sympy.Poly]:
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    return p.to_sympy().sqf_part().sturm()


def sturm_real_root_count(p: IntPoly, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in (lo, hi]."""
    if p.is_zero():
        raise ValueError("cannot count roots of the zero polynomial")
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi}]")
    sequence = sturm_sequence(p)
    at_lo = [q.eval(_sympy_rational(Fraction(lo))) for q in sequence]
    at_hi = [q.eval(_sympy_rational(Fraction(hi))) for q in sequence]
    return _sign_variations(at_lo) - _sign_variations(at_hi)


def cauchy_bound(p: IntPoly) -> Fraction:
    """B = 1 + max |q_i / q_deg|; every root has modulus below B."""
    lead = p.coeffs[-1]
    return 1 + max((abs(Fraction(c, lead)) for c in p.coeffs[:-1]), default=Fraction(0))


def _root_certificate(p: IntPoly, lo: Fraction, hi: Fraction) -> Tuple[bool, Dict[str, Any]]:
    """Check that every root of p lies in (lo, hi], factor by square-free factor."""
    _, factors = p.to_sympy().sqf_list()
    entries = []
    total = 0
    for factor, multiplicity in factors:
        f = IntPoly.from_sympy(factor)
        count = sturm_real_root_count(f, lo, hi)
        total += count * multiplicity
        entries.append({"factor": list(f.coeffs), "multiplicity": multiplicity,
                        "roots_in_interval": count})
    certificate = {
        "method": "sturm",
        "interval": [str(lo), str(hi)],
        "factors": entries,
        "roots_counted": total,
        "degree": p.degree,
    }
    return total == p.degree, certificate


def verify_certificate(classification: Classification, series: SeriesCoeffs) -> bool:
    """Replay a classification: polynomial identity and Sturm counts."""
    if classification.kind == INDETERMINATE:
        return False
    poly = IntPoly(tuple(classification.signature))
    n = series.degree
    if classification.kind == TRANSFERMIONIC:
        padded = list(poly.coeffs) + [0] * max(0, n + 1 - len(poly.coeffs))
        if list(series.coeffs) != padded[:n + 1]:
            return False
        lo, hi = -cauchy_bound(poly), Fraction(0)
    else:
        if series_multiply(poly.coeffs, series.coeffs, n) != [1] + [0] * n:
            return False
        lo, hi = Fraction(0), cauchy_bound(poly)
    ok, certificate = _root_certificate(poly, lo, hi)
    return ok and certificate["factors"] == classification.certificate.get("factors")


def infer_termination(series: SeriesCoeffs) -> SeriesCoeffs:
    """Treat a zero tail after degree 0 as a termination certificate.

    A graded quotient that vanishes in degree m vanishes in every higher
    degree, so a bare list like [1, 3, 1, 0, 0] ends at 3. Without a zero the
    series is left alone: [1, 3, 1] proves nothing about degree 3.
    """
    if series.terminated_at is not None:
        return series
    coeffs = series.coeffs
    first_zero = next((m for m in range(1, len(coeffs)) if coeffs[m] == 0), None)
    if first_zero is None or any(coeffs[first_zero:]):
        return series
    return SeriesCoeffs(coeffs, first_zero)


def expand_signature(classification: Classification, n: int) -> SeriesCoeffs:
    """The series a signature stands for, up to t^n."""
    coeffs = list(classification.signature)
    if classification.kind == TRANSFERMIONIC:
        padded = (coeffs + [0] * (n + 1))[:n + 1]
        return SeriesCoeffs(tuple(padded), len(coeffs) if len(coeffs) <= n else None)
    if classification.kind == TRANSBOSONIC:
        out = [1]
        for j in range(1, n + 1):
            out.append(-sum(coeffs[i] * out[j - i] for i in range(1, min(j, len(coeffs) - 1) + 1)))
        return SeriesCoeffs(tuple(out))
    raise ValueError("an indeterminate classification has no series")


@dataclass(frozen=True)
class PadeFit:
    numerator: Tuple[Fraction, ...]
    denominator: Tuple[Fraction, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"numerator": [str(c) for c in self.numerator],
                "denominator": [str(c) for c in self.denominator]}


def pade_fit(series: SeriesCoeffs, max_degree: int) -> Optional[PadeFit]:
    """Smallest P/Q with Q(0) = 1 and P ≡ Q·G mod t^{N+1}, checked on at least one extra coefficient."""
    g = [Fraction(c) for c in series.coeffs]
    n = len(g) - 1
    for total in range(0, 2 * max_degree + 1):
        for q_deg in range(0, min(total, max_degree) + 1):
            p_deg = total - q_deg
            if p_deg > max_degree or n - p_deg < q_deg + 1:
                continue
            q = _solve_denominator(g, p_deg, q_deg)
            if q is None:
                continue
            product = [sum((q[i] * g[j - i] for i in range(min(j, q_deg) + 1)), Fraction(0))
                       for j in range(n + 1)]
            numerator = list(product[:p_deg + 1])
            while numerator and numerator[-1] == 0:
                numerator.pop()
            return PadeFit(tuple(numerator), tuple(q))
    return None


def _solve_denominator(g: List[Fraction], p_deg: int, q_deg: int) -> Optional[List[Fraction]]:
    n = len(g) - 1
    if q_deg == 0:
        return [Fraction(1)] if all(x == 0 for x in g[p_deg + 1:]) else None
    rows = [[g[j - i] if j - i >= 0 else Fraction(0) for i in range(1, q_deg + 1)] + [-g[j]]
            for j in range(p_deg + 1, n + 1)]
    reduced, pivots = rref(RationalMatrix.from_rows(rows, q_deg + 1))
    if q_deg in pivots:
        return None
    q = [Fraction(1)] + [Fraction(0)] * q_deg
    for r, p in enumerate(pivots):
        q[p + 1] = reduced[r, q_deg]
    return q


class SeriesClassifier:
    """Applies the transfermionic / transbosonic dichotomy to a single-mode series."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)

    def classify(self, series: SeriesCoeffs, max_fit_degree: Optional[int] = None) -> Classification:
        max_fit = self.config.max_fit_degree if max_fit_degree is None else max_fit_degree
        series = infer_termination(series)
        if series.terminated_at is not None:
            result = self._classify_terminated(series)
        else:
            result = self._classify_reciprocal(series, max_fit)
        self.logger.info(f"Classification: {result.label} {result.reason}".rstrip())
        return result

    def _classify_terminated(self, series: SeriesCoeffs) -> Classification:
        poly = IntPoly(tuple(series.coeffs[:series.terminated_at]))
        if any(c <= 0 for c in poly.coeffs):
            return Classification(INDETERMINATE, reason="terminating series has a nonpositive coefficient")
        if poly.degree == 0:
            return Classification(TRANSFERMIONIC, list(poly.coeffs), "-",
                                  {"method": "sturm", "factors": [], "roots_counted": 0, "degree": 0})
        ok, certificate = _root_certificate(poly, -cauchy_bound(poly), Fraction(0))
        if not ok:
            return Classification(INDETERMINATE, certificate=certificate,
                                  reason="terminating series has roots off the negative real axis")
        return Classification(TRANSFERMIONIC, list(poly.coeffs), "-", certificate)

    def _classify_reciprocal(self, series: SeriesCoeffs, max_fit: int) -> Classification:
        g = list(series.coeffs)
        if len(g) < 2 * max_fit + 1:
            raise InsufficientCoefficientsError(
                f"{len(g)} coefficients cannot certify a fit of degree {max_fit}; "
                f"need {2 * max_fit + 1} (raise --degree or lower --max-fit-degree)")
        for m in range(1, max_fit + 1):
            q = [1]
            for j in range(1, m + 1):
                q.append(-sum(q[i] * g[j - i] for i in range(j)))
            if q[m] == 0:
                continue
            if series_multiply(q, g, len(g) - 1) != [1] + [0] * (len(g) - 1):
                continue
            poly = IntPoly(tuple(q))
            ok, certificate = _root_certificate(poly, Fraction(0), cauchy_bound(poly))
            if not ok:
                return Classification(INDETERMINATE, certificate=certificate,
                                      reason=f"1/G = {list(poly.coeffs)} has roots off the positive real axis")
            certificate["identity"] = f"Q_+ * G = 1 mod t^{len(g)}"
            return Classification(TRANSBOSONIC, list(poly.coeffs), "+", certificate)
        return Classification(INDETERMINATE,
                              reason=f"no terminating polynomial and no Q_+ of degree <= {max_fit}")
