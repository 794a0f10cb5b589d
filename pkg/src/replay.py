"""
Re-evaluation of the witnesses stored in a report.

The model is rebuilt from the report's echo, and every failing leaf check is
recomputed from its context block. A witness is reproduced when the residual
recomputed on its input equals the stored difference exactly.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .braid import AdmissibleSets, BraidChecker, braid_difference, combination_json, normal_form
from .checks import Witness
from .classify import INDETERMINATE, SeriesClassifier
from .config import Config
from .errors import ModelFileError, QuadstatError, ReplayError
from .exactla import RationalMatrix, Subspace, Vector
from .fock import ExchangeData, FockRealization, FockRealizer, identity_residual
from .hilbert import HilbertSeriesCalculator, SeriesCoeffs, series_multiply, series_power, sign_flip
from .json_output import REPORT_SCHEMA_VERSION
from .koszul import KoszulDual
from .model_file import parse_model_document
from .statmodel import (
    RelationSet,
    StatModel,
    assemble_pgen,
    equivariance_difference,
    internal_projectors,
    relation_vectors,
)

REPRODUCED = "reproduced"
MISMATCH = "mismatch"
UNSUPPORTED = "unsupported"


@dataclass
class ReplayOutcome:
    check: str
    identity: str
    status: str
    details: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"check": self.check, "identity": self.identity,
                "status": self.status, "details": self.details}


def iter_report_witnesses(check: Dict[str, Any]) -> Iterator[Tuple[str, Dict[str, Any]]]:
    """Leaf witnesses of a serialized check tree, children first."""
    for child in check.get("children", []):
        yield from iter_report_witnesses(child)
    if "witness" in check and not check.get("children"):
        yield check["name"], check["witness"]


class WitnessReplayer:
    """Recomputes serialized witnesses against a freshly assembled model."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.hilbert = HilbertSeriesCalculator(config)
        self.braid = BraidChecker(config)
        self.koszul = KoszulDual(config)
        self.fock = FockRealizer(config)
        self.classifier = SeriesClassifier(config)
        self._fock_cache: Dict[int, FockRealization] = {}
        self._sets: Optional[AdmissibleSets] = None

    def load_report(self, path: Path) -> Dict[str, Any]:
        try:
            report = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ReplayError(f"cannot read report {path}: {e.strerror}")
        except json.JSONDecodeError as e:
            raise ReplayError(f"report {path} is not valid JSON (line {e.lineno}): {e.msg}")
        if not isinstance(report, dict) or report.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ReplayError(f"report {path} does not have schema version {REPORT_SCHEMA_VERSION}")
        return report

    def replay_file(self, path: Path) -> List[ReplayOutcome]:
        return self.replay_report(self.load_report(path))

    def replay_report(self, report: Dict[str, Any]) -> List[ReplayOutcome]:
        """Replay every witness in the report, in report order."""
        try:
            model_file = parse_model_document(report["model"], source="report")
        except (KeyError, ModelFileError) as e:
            raise ReplayError(f"report carries no usable model echo: {e}")
        self.config.adopt_file_guard(model_file.max_ambient_dim)
        model = model_file.model
        rs = assemble_pgen(model)
        self._fock_cache.clear()
        self._sets = None

        outcomes = []
        for check in report.get("checks", []):
            for name, data in iter_report_witnesses(check):
                witness = Witness.from_dict(data)
                outcome = self.replay_witness(name, witness, model, rs, model_file.exchange)
                level = logging.INFO if outcome.status == REPRODUCED else logging.WARNING
                self.logger.log(level, f"{name}: {outcome.status} {outcome.details}".rstrip())
                outcomes.append(outcome)
        self.logger.info(f"Replayed {len(outcomes)} witnesses")
        return outcomes

    def replay_witness(self, name: str, witness: Witness, model: StatModel, rs: RelationSet,
                       exchange: Optional[ExchangeData]) -> ReplayOutcome:
        context = witness.context
        identity = str(context.get("identity", ""))
        try:
            status, details = self._dispatch(name, identity, witness, model, rs, exchange)
        except (KeyError, ValueError, TypeError) as e:
            raise ReplayError(f"witness of {name} has a malformed context: {e}")
        except QuadstatError as e:
            status, details = MISMATCH, f"recomputation failed: {e}"
        return ReplayOutcome(check=name, identity=identity, status=status, details=details)

    def _dispatch(self, name: str, identity: str, witness: Witness, model: StatModel,
                  rs: RelationSet, exchange: Optional[ExchangeData]) -> Tuple[str, str]:
        context = witness.context
        if identity == "global_yb":
            return self._matrix(witness, braid_difference(rs.p_gen, rs.base_dim))
        if identity in ("internal_braid_sym", "internal_braid_ext"):
            projector = internal_projectors(model)[0 if identity.endswith("sym") else 1]
            return self._matrix(witness, braid_difference(projector, model.k_dim))
        if identity == "reduction_braid":
            sets = self._admissible(model, rs)
            return self._matrix(witness, braid_difference(sets.reduction, sets.base_dim))
        if identity == "equivariance":
            u = _signed_permutation(context["perm"], context["signs"])
            return self._matrix(witness, equivariance_difference(rs, model, u))
        if identity == "confluence":
            return self._confluence(model, rs, context)
        if identity == "cubic_count":
            s3 = len(self._admissible(model, rs).s3)
            w3 = self.hilbert.full_series(model, rs, 3).coeffs[3]
            return _compare({"s3": s3, "w3": w3}, {"s3": context["s3"], "w3": context["w3"]})
        if identity == "factorization":
            return self._factorization(model, rs, context)
        if identity == "koszul":
            return self._koszul(model, rs, context)
        if identity == "double_dual":
            sector_model, sector_rs = self._sector(model, rs, name)
            report = self.koszul.check_double_dual(sector_rs, sector_model.gram_pair)
            recomputed = report.witness.context if report.witness else {}
            return _compare(recomputed, context)
        if identity == "oracle":
            sector_model, sector_rs = self._sector(model, rs, name)
            degree = int(context["degree"])
            kernel = self.hilbert.series_from_projector(sector_rs.p_gen, sector_rs.base_dim, degree)
            quotient = self.hilbert.quotient_dimension(sector_rs.r_gen, sector_rs.base_dim, degree)
            return _compare({"kernel": kernel.coeffs[degree], "quotient": quotient},
                            {"kernel": context["kernel"], "quotient": context["quotient"]})
        if identity == "classification":
            series = SeriesCoeffs(tuple(int(c) for c in context["series"]))
            series = self.hilbert.single_mode_series(model, series.degree)
            kind = self.classifier.classify(series).kind
            return _compare({"kind": kind, "series": list(series.coeffs)},
                            {"kind": INDETERMINATE, "series": context["series"]})
        if identity == "relation_span":
            spanned = Subspace.span(relation_vectors(rs, model), rs.ambient)
            return _compare({"dim": spanned.dim}, {"dim": context["dim"]})
        if identity == "fock":
            fock = self._fock_space(model, rs, int(context["n_max"]))
            residual = identity_residual(fock, context["key"], context["params"],
                                         int(context["level"]), exchange)
            return self._matrix(witness, residual)
        if identity == "level_positivity":
            fock = self._fock_space(model, rs, int(context["n_max"]))
            report = self.fock.check_level_positivity(fock)
            return _compare(report.witness.context if report.witness else {}, context)
        if identity == "exchange_adjointness":
            if exchange is None:
                return MISMATCH, "the report echo carries no exchange tensors"
            report = self.fock.check_exchange_adjointness(model, exchange)
            return _compare(report.witness.context if report.witness else {}, context)
        return UNSUPPORTED, f"no replay rule for identity {identity!r}"

    def _matrix(self, witness: Witness, residual: RationalMatrix) -> Tuple[str, str]:
        if witness.input is None or witness.difference is None:
            return MISMATCH, "witness has no input vector"
        if len(witness.input) != residual.cols:
            return MISMATCH, f"input has length {len(witness.input)}, operator acts on {residual.cols}"
        recomputed: Vector = residual.apply(witness.input)
        if tuple(recomputed) == tuple(witness.difference):
            return REPRODUCED, f"residual of length {len(recomputed)} matches"
        return MISMATCH, "recomputed residual differs from the stored difference"

    def _admissible(self, model: StatModel, rs: RelationSet) -> AdmissibleSets:
        if self._sets is None:
            self._sets = self.braid.build_admissible(model, rs)
        return self._sets

    def _confluence(self, model: StatModel, rs: RelationSet, context: Dict[str, Any]) -> Tuple[str, str]:
        sets = self._admissible(model, rs)
        word = [int(x) for x in context["word"]]
        left = combination_json(normal_form(sets, word, first=0))
        right = combination_json(normal_form(sets, word, first=1))
        if left == right:
            return MISMATCH, f"{model.word_label(word)} now has a single normal form"
        return _compare({"left_first": left, "right_first": right},
                        {"left_first": context["left_first"], "right_first": context["right_first"]})

    def _factorization(self, model: StatModel, rs: RelationSet,
                       context: Dict[str, Any]) -> Tuple[str, str]:
        degree = int(context["degree"])
        single = self.hilbert.single_mode_series(model, degree)
        full = self.hilbert.full_series(model, rs, degree)
        expected = series_power(single.coeffs, model.d, degree)[degree]
        return _compare({"full": full.coeffs[degree], "expected": expected},
                        {"full": context["full"], "expected": context["expected"]})

    def _koszul(self, model: StatModel, rs: RelationSet, context: Dict[str, Any]) -> Tuple[str, str]:
        degree = int(context["degree"])
        sector = context.get("sector", "single")
        sector_model, sector_rs = self._sector(model, rs, sector)
        dual = self.koszul.dual_relations(sector_rs, sector_model.gram_pair)
        g = self.hilbert.series_from_projector(sector_rs.p_gen, sector_rs.base_dim, degree)
        g_dual = self.koszul.dual_series(dual, degree)
        value = series_multiply(g.coeffs, sign_flip(g_dual.coeffs), degree)[degree]
        return _compare({"value": value}, {"value": context["value"]})

    def _sector(self, model: StatModel, rs: RelationSet, label: str) -> Tuple[StatModel, RelationSet]:
        if label.endswith("single"):
            single = model.single_mode()
            return single, assemble_pgen(single)
        return model, rs

    def _fock_space(self, model: StatModel, rs: RelationSet, n_max: int) -> FockRealization:
        if n_max not in self._fock_cache:
            self._fock_cache[n_max] = self.fock.build_fock(model, rs, n_max)
        return self._fock_cache[n_max]


def _signed_permutation(perm: List[int], signs: List[int]) -> RationalMatrix:
    d = len(perm)
    rows = [[0] * d for _ in range(d)]
    for r, c in enumerate(perm):
        rows[r][int(c)] = int(signs[r])
    return RationalMatrix(d, d, rows)


def _compare(recomputed: Dict[str, Any], stored: Dict[str, Any]) -> Tuple[str, str]:
    if json.dumps(recomputed, sort_keys=True, default=str) == json.dumps(stored, sort_keys=True, default=str):
        return REPRODUCED, "recomputed values match"
    return MISMATCH, f"recomputed {recomputed}, stored {stored}"
