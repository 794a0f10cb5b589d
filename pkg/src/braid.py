"""
Braid identities and ordered-monomial (PBW) diagnostics.

Two operator families are checked independently: the orthogonal relation
projector P_gen acting on adjacent slots of H^{⊗3}, and the reduction map π
that rewrites each non-admissible degree-2 monomial into its normal form.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .checks import CheckReport, Witness, compare_matrices
from .config import Config
from .errors import OrderIncompatibleError
from .exactla import RationalMatrix, kernel, kron, rref
from .hilbert import HilbertSeriesCalculator
from .statmodel import RelationSet, StatModel, internal_projectors

Word = Tuple[int, ...]
Combination = Dict[Word, Fraction]


@dataclass(frozen=True)
class AdmissibleSets:
    """Admissible pairs and triples plus the degree-2 reduction map."""

    base_dim: int
    ranks: Tuple[int, ...]
    s2: Tuple[Tuple[int, int], ...]
    s3: Tuple[Tuple[int, int, int], ...]
    reduction: RationalMatrix
    rules: Dict[Tuple[int, int], Combination] = field(default_factory=dict, compare=False, hash=False)

    def is_admissible(self, a: int, b: int) -> bool:
        return (a, b) not in self.rules

    def word_key(self, word: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.ranks[x] for x in word)


def adjacent_pair(p: RationalMatrix, base_dim: int) -> Tuple[RationalMatrix, RationalMatrix]:
    """(p ⊗ id, id ⊗ p) on the third tensor power."""
    identity = RationalMatrix.identity(base_dim)
    return kron(p, identity), kron(identity, p)


def braid_sides(p: RationalMatrix, base_dim: int) -> Tuple[RationalMatrix, RationalMatrix]:
    """(p12 p23 p12, p23 p12 p23)."""
    p12, p23 = adjacent_pair(p, base_dim)
    return p12 @ p23 @ p12, p23 @ p12 @ p23


def braid_difference(p: RationalMatrix, base_dim: int) -> RationalMatrix:
    lhs, rhs = braid_sides(p, base_dim)
    return lhs - rhs


def admissible_count(sets: AdmissibleSets, n: int) -> int:
    """Number of words of length n whose adjacent pairs are all admissible."""
    if n == 0:
        return 1
    counts = [1] * sets.base_dim
    for _ in range(n - 1):
        counts = [sum(counts[a] for a in range(sets.base_dim) if sets.is_admissible(a, b))
                  for b in range(sets.base_dim)]
    return sum(counts)


def _reduce_at(sets: AdmissibleSets, word: Word, position: int) -> Optional[Combination]:
    rule = sets.rules.get((word[position], word[position + 1]))
    if rule is None:
        return None
    return {word[:position] + pair + word[position + 2:]: c for pair, c in rule.items()}


def normal_form(sets: AdmissibleSets, word: Sequence[int], first: Optional[int] = None) -> Combination:
    """Rewrite a word to admissible monomials, reducing slot `first` first and then leftmost."""
    word = tuple(word)
    pending: Combination = {word: Fraction(1)}
    if first is not None:
        reduced = _reduce_at(sets, word, first)
        if reduced is not None:
            pending = reduced
    result: Combination = {}
    while pending:
        current, coeff = pending.popitem()
        if not coeff:
            continue
        for position in range(len(current) - 1):
            reduced = _reduce_at(sets, current, position)
            if reduced is not None:
                for target, c in reduced.items():
                    pending[target] = pending.get(target, Fraction(0)) + coeff * c
                break
        else:
            result[current] = result.get(current, Fraction(0)) + coeff
    return {w: c for w, c in sorted(result.items()) if c}


def combination_label(model: StatModel, combination: Combination) -> str:
    if not combination:
        return "0"
    return " + ".join(f"({c})·{model.word_label(w)}" if c != 1 else model.word_label(w)
                      for w, c in combination.items())


class BraidChecker:
    """Yang–Baxter, internal braid and PBW checks for one model."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.hilbert = HilbertSeriesCalculator(config)

    def check_global_yb(self, rs: RelationSet) -> CheckReport:
        """Braid identity for P_gen on H^{⊗3}."""
        self.config.check_dimension(rs.base_dim ** 3, "degree-3 tensor power")
        lhs, rhs = braid_sides(rs.p_gen, rs.base_dim)
        report = compare_matrices("global_yb", lhs, rhs, {"identity": "global_yb"})
        self._log(report)
        return report

    def check_internal_braids(self, model: StatModel) -> Tuple[CheckReport, CheckReport]:
        """Braid identities for the internal projectors on K^{⊗3}."""
        k = model.k_dim
        self.config.check_dimension(k ** 3, "internal degree-3 tensor power")
        reports = []
        for sector, projector in zip(("sym", "ext"), internal_projectors(model)):
            lhs, rhs = braid_sides(projector, k)
            report = compare_matrices(f"internal_braid_{sector}", lhs, rhs,
                                      {"identity": f"internal_braid_{sector}"})
            self._log(report)
            reports.append(report)
        return reports[0], reports[1]

    def build_admissible(self, model: StatModel, rs: RelationSet) -> AdmissibleSets:
        """Leading monomials of R_gen in descending order and the reduction map π."""
        D = model.h_dim
        rank_of = model.rank_of()
        ranks = tuple(rank_of[x] for x in range(D))
        monomials = sorted(range(D * D), key=lambda m: (ranks[m // D], ranks[m % D]), reverse=True)

        basis = rs.r_gen.basis
        ordered = RationalMatrix(basis.rows, D * D,
                                 [[row[m] for m in monomials] for row in basis.row_list()])
        reduced, pivots = rref(ordered)
        pivot_set = set(pivots)

        rules: Dict[Tuple[int, int], Combination] = {}
        columns: Dict[int, List[Fraction]] = {}
        for r, p in enumerate(pivots):
            lead = monomials[p]
            target = [Fraction(0)] * (D * D)
            combination: Combination = {}
            for c in range(p + 1, D * D):
                x = reduced[r, c]
                if x and c not in pivot_set:
                    target[monomials[c]] = -x
                    combination[divmod(monomials[c], D)] = -x
            rules[divmod(lead, D)] = combination
            columns[lead] = target

        size = D * D
        pi_columns = [columns.get(m) or [Fraction(int(m == row)) for row in range(size)]
                      for m in range(size)]
        reduction = RationalMatrix.from_columns(pi_columns, size)
        if kernel(reduction) != rs.r_gen:
            raise OrderIncompatibleError(
                f"order {list(model.order)} does not triangularize the relations of {model.name}")

        s2 = tuple(sorted((divmod(m, D) for m in range(size) if divmod(m, D) not in rules),
                          key=lambda ab: (ranks[ab[0]], ranks[ab[1]])))
        admissible = set(s2)
        s3 = tuple((a, b, c) for a, b in s2 for c in range(D)
                   if (b, c) in admissible)
        s3 = tuple(sorted(s3, key=lambda w: tuple(ranks[x] for x in w)))
        self.logger.info(f"Admissible pairs for {model.name}: {len(s2)} of {size}; triples: {len(s3)}")
        return AdmissibleSets(base_dim=D, ranks=ranks, s2=s2, s3=s3,
                              reduction=reduction, rules=rules)

    def reduction_braid(self, sets: AdmissibleSets) -> CheckReport:
        """π12 π23 π12 = π23 π12 π23 on H^{⊗3}."""
        self.config.check_dimension(sets.base_dim ** 3, "degree-3 tensor power")
        lhs, rhs = braid_sides(sets.reduction, sets.base_dim)
        return compare_matrices("reduction_braid", lhs, rhs, {"identity": "reduction_braid"})

    def confluence_witness(self, model: StatModel, sets: AdmissibleSets) -> CheckReport:
        """First cubic word whose two rewriting orders disagree."""
        words = sorted(itertools.product(range(sets.base_dim), repeat=3), key=sets.word_key)
        for word in words:
            left = normal_form(sets, word, first=0)
            right = normal_form(sets, word, first=1)
            if left != right:
                witness = Witness(context={
                    "identity": "confluence",
                    "word": list(word),
                    "left_first": combination_json(left),
                    "right_first": combination_json(right),
                })
                details = (f"{model.word_label(word)} reduces to {combination_label(model, left)} "
                           f"(slots 1-2 first) and to {combination_label(model, right)} (slots 2-3 first)")
                return CheckReport.failure("confluence", witness, details,
                                           word=model.word_label(word))
        return CheckReport.success("confluence", f"all {len(words)} cubic words have one normal form")

    def pbw_cubic_check(self, model: StatModel, rs: RelationSet,
                        sets: Optional[AdmissibleSets] = None) -> CheckReport:
        """|S^(3)| against dim W_3, the π braid identity, and a rewriting witness."""
        if sets is None:
            sets = self.build_admissible(model, rs)
        w3 = self.hilbert.full_series(model, rs, 3).coeffs[3]
        s3 = len(sets.s3)
        if s3 == w3:
            count = CheckReport.success("cubic_count", f"|S3| = dim W3 = {w3}", s3=s3, w3=w3)
        else:
            count = CheckReport.failure(
                "cubic_count",
                Witness(context={"identity": "cubic_count", "s3": s3, "w3": w3}),
                f"|S3| = {s3} but dim W3 = {w3}", s3=s3, w3=w3)
        braid = self.reduction_braid(sets)
        confluence = self.confluence_witness(model, sets)
        report = CheckReport.combine("pbw_cubic", [count, braid, confluence], s3=s3, w3=w3)
        self._log(report)
        return report

    def yb_report(self, model: StatModel, rs: RelationSet, n: int) -> Tuple[CheckReport, List[str]]:
        """Every braid-level check plus the cross-check alarms.

        The verdict rests on the internal braids and the PBW cubic certificate.
        The orthogonal P_gen braid is advisory: on two or more modes the plain
        (anti)symmetrizer already misses it by ±(P12 − P23)/8, and any
        disagreement with the PBW verdict is raised as an alarm.
        """
        global_yb = self.check_global_yb(rs)
        internal_sym, internal_ext = self.check_internal_braids(model)
        sets = self.build_admissible(model, rs)
        pbw = self.pbw_cubic_check(model, rs, sets)

        alarms = []
        if global_yb.passed != pbw.passed:
            alarms.append(f"global Yang-Baxter check {_verdict(global_yb)} but the PBW cubic "
                          f"check {_verdict(pbw)}")
        # one mode: P_gen has no antisymmetric sector, W_ext never enters it
        if model.d == 1:
            internal_ext.data["applicable"] = False
            gating, advisory = [internal_sym, pbw], [global_yb, internal_ext]
            internal_ok = internal_sym.passed
        else:
            gating, advisory = [internal_sym, internal_ext, pbw], [global_yb]
            internal_ok = internal_sym.passed and internal_ext.passed
        if global_yb.passed != internal_ok:
            alarms.append(f"global Yang-Baxter check {_verdict(global_yb)} but the internal "
                          f"braid checks {'pass' if internal_ok else 'fail'}")
        for alarm in alarms:
            self.logger.warning(f"Consistency alarm: {alarm}")

        levels = self.hilbert.full_series(model, rs, n).coeffs
        counts = {str(m): {"admissible": admissible_count(sets, m), "dim_w": levels[m]}
                  for m in range(n + 1)}
        report = CheckReport.combine(
            "yb", gating, advisory=advisory,
            s2=[model.word_label(p) for p in sets.s2],
            s3_size=len(sets.s3),
            normal_forms={model.word_label(p): combination_label(model, c)
                          for p, c in sorted(sets.rules.items(), key=lambda kv: sets.word_key(kv[0]))},
            counts=counts)
        return report, alarms

    def _log(self, report: CheckReport) -> None:
        if report.passed:
            self.logger.info(f"{report.name}: passed")
        else:
            self.logger.warning(f"{report.name}: FAILED ({report.details})")


def _verdict(report: CheckReport) -> str:
    return "passes" if report.passed else "fails"


def combination_json(combination: Combination) -> List[list]:
    """[[word, "p/q"], ...], the serialized form of a rewriting result."""
    return [[list(w), str(c)] for w, c in combination.items()]
