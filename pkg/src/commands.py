"""
Command services behind the quadstat subcommands.

Each command loads a model file, runs the checks of its module and returns a
Section; `QuadstatCommands.run` turns sections into the versioned JSON report
and the exit code (0 pass, 1 mathematical failure, 2 input error).
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .braid import BraidChecker
from .checks import CheckReport, Witness
from .classify import INDETERMINATE, SeriesClassifier, pade_fit, verify_certificate
from .config import Config
from .errors import OrderIncompatibleError
from .exactla import Subspace, is_projector
from .fock import FockRealizer
from .hilbert import HilbertSeriesCalculator, SeriesCoeffs
from .json_output import JSONOutput
from .koszul import KoszulDual
from .model_file import ModelFile, exchange_to_document, load_model_file, model_document
from .statmodel import RelationSet, StatModel, assemble_pgen, check_equivariance, relation_vectors

COMMANDS = ("validate", "yb", "hilbert", "classify", "koszul", "fock", "report-all")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2


@dataclass
class Section:
    """Everything one command contributes to a report."""

    checks: List[CheckReport] = field(default_factory=list)
    series: Dict[str, Any] = field(default_factory=dict)
    classification: Optional[Dict[str, Any]] = None
    alarms: List[str] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


@dataclass
class CommandResult:
    report: Dict[str, Any]
    exit_code: int


@dataclass
class ModelContext:
    """A loaded model with its assembled relations."""

    model_file: ModelFile
    model: StatModel
    rs: RelationSet

    @property
    def exchange(self):
        return self.model_file.exchange

    def echo(self) -> Dict[str, Any]:
        return model_document(self.model, exchange_to_document(self.exchange),
                              self.model_file.max_ambient_dim)


class QuadstatCommands:
    """Runs one subcommand against a model file and assembles its report."""

    def __init__(self, config: Config):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.hilbert = HilbertSeriesCalculator(config)
        self.braid = BraidChecker(config)
        self.classifier = SeriesClassifier(config)
        self.koszul = KoszulDual(config)
        self.fock = FockRealizer(config)
        self.output = JSONOutput(config)

    def load(self, path: Path) -> ModelContext:
        """Parse the file, apply its guard and assemble P_gen."""
        model_file = load_model_file(path)
        self.config.adopt_file_guard(model_file.max_ambient_dim)
        model = model_file.model
        self.config.check_dimension(model.pair_dim, "pair space H⊗H")
        rs = assemble_pgen(model)
        self.logger.info(f"Loaded {model.name}: d={model.d}, k_dim={model.k_dim}, "
                         f"guard {self.config.guard_dim} ({self.config.guard_source})")
        return ModelContext(model_file=model_file, model=model, rs=rs)

    def degree_for(self, model: StatModel) -> int:
        return self.config.degree if self.config.degree is not None else model.n_max

    def run(self, command: str, path: Path) -> CommandResult:
        """Execute a command and write its report if an output path is configured."""
        start_time = datetime.now()
        ctx = self.load(path)
        handlers: Dict[str, Callable[[ModelContext], Section]] = {
            "validate": self.validate,
            "yb": self.yb,
            "hilbert": self.hilbert_series,
            "classify": self.classify,
            "koszul": self.koszul_duality,
            "fock": self.fock_space,
            "report-all": self.report_all,
        }
        if command not in handlers:
            raise ValueError(f"unknown command {command!r}")
        self.logger.info(f"Running {command} on {ctx.model.name}")
        section = handlers[command](ctx)

        report = self.output.generate_output(command, ctx.echo(), section.checks, section.series,
                                             section.classification, section.alarms,
                                             section.results, start_time)
        if not self.output.validate_output(report):
            self.logger.warning("Generated report failed structural validation")
        if self.config.output_path:
            self.output.write_output(report, self.config.output_path)

        if section.passed:
            exit_code = EXIT_OK
        else:
            exit_code = EXIT_INPUT_ERROR if command == "validate" else EXIT_FAILURE
        return CommandResult(report=report, exit_code=exit_code)

    def validate(self, ctx: ModelContext) -> Section:
        """Projector property, rank bookkeeping, relation span and equivariance."""
        model, rs = ctx.model, ctx.rs
        section = Section()

        if is_projector(rs.p_gen, model.gram_pair):
            section.checks.append(CheckReport.success(
                "projector", "P_gen is idempotent and self-adjoint for g⊗g"))
        else:
            section.checks.append(CheckReport.failure(
                "projector", Witness(context={"identity": "projector"}),
                "P_gen is not a self-adjoint idempotent"))

        d = model.d
        ranks = {"sym": d * (d + 1) // 2 * model.w_sym.dim,
                 "ext": d * (d - 1) // 2 * model.w_ext.dim}
        if rs.rank == ranks["sym"] + ranks["ext"]:
            section.checks.append(CheckReport.success(
                "rank", f"rank {rs.rank} = {ranks['sym']} + {ranks['ext']}", **ranks))
        else:
            section.checks.append(CheckReport.failure(
                "rank", Witness(context={"identity": "rank", "rank": rs.rank, **ranks}),
                f"rank {rs.rank} but the sectors give {ranks['sym'] + ranks['ext']}", **ranks))

        spanned = Subspace.span(relation_vectors(rs, model), rs.ambient)
        if spanned == rs.r_gen:
            section.checks.append(CheckReport.success(
                "relation_span", f"{d * d * model.k_dim ** 2} relation vectors span R_gen"))
        else:
            section.checks.append(CheckReport.failure(
                "relation_span", Witness(context={"identity": "relation_span", "dim": spanned.dim}),
                f"relation vectors span dimension {spanned.dim}, R_gen has {rs.r_gen.dim}"))

        section.checks.append(check_equivariance(rs, model))
        if ctx.exchange is not None and ctx.exchange.has("C") and ctx.exchange.has("S"):
            section.checks.append(self.fock.check_exchange_adjointness(model, ctx.exchange))

        section.results = {
            "rank": {"sym": ranks["sym"], "ext": ranks["ext"], "total": rs.rank},
            "w_sym_dim": model.w_sym.dim,
            "w_ext_dim": model.w_ext.dim,
            "h_dim": model.h_dim,
            "pair_dim": model.pair_dim,
        }
        return section

    def yb(self, ctx: ModelContext) -> Section:
        """Global and internal braid identities and the PBW cubic check."""
        report, alarms = self.braid.yb_report(ctx.model, ctx.rs, self.degree_for(ctx.model))
        return Section(checks=[report], alarms=alarms)

    def hilbert_series(self, ctx: ModelContext) -> Section:
        """Single-mode and full series, the oracle cross-check and factorization."""
        model, rs = ctx.model, ctx.rs
        mode = self.config.mode or "both"
        n = self.degree_for(model)
        section = Section()

        single = self.hilbert.single_mode_series(model, n)
        section.series["single"] = single.to_dict()
        section.checks.append(self._oracle_check(
            "oracle_single", single, assemble_pgen(model.single_mode()).r_gen, model.k_dim))
        termination = {"single": single.terminated_at}

        if mode in ("full", "both"):
            full = self.hilbert.full_series(model, rs, n)
            section.series["full"] = full.to_dict()
            section.checks.append(self._oracle_check("oracle_full", full, rs.r_gen, rs.base_dim))
            section.checks.append(self.hilbert.check_factorization(model, single, full))
            termination["full"] = full.terminated_at
        if mode == "full":
            del section.series["single"]
            section.checks = [c for c in section.checks if c.name != "oracle_single"]
            del termination["single"]

        section.results = {"mode": mode, "degree": n, "termination": termination}
        return section

    def _oracle_check(self, name: str, series: SeriesCoeffs, relations: Subspace,
                      base_dim: int) -> CheckReport:
        """Graded kernel dimensions against quotient dimensions by subspace sums."""
        compared = []
        for m in range(min(3, series.degree) + 1):
            if base_dim ** m > self.config.spot_check_dim:
                break
            quotient = self.hilbert.quotient_dimension(relations, base_dim, m)
            compared.append(m)
            if quotient != series.coeffs[m]:
                witness = Witness(context={"identity": "oracle", "degree": m,
                                           "kernel": series.coeffs[m], "quotient": quotient})
                return CheckReport.failure(name, witness,
                                           f"degree {m}: kernel dim {series.coeffs[m]}, "
                                           f"quotient dim {quotient}")
        return CheckReport.success(name, f"kernel and quotient dimensions agree on degrees {compared}",
                                   degrees=compared)

    def classify(self, ctx: ModelContext) -> Section:
        """Transfermionic / transbosonic classification of G(t) with its certificate."""
        model = ctx.model
        n = self.degree_for(model)
        series = self.hilbert.single_mode_series(model, n)
        classification = self.classifier.classify(series)
        section = Section(series={"single": series.to_dict()},
                          classification=classification.to_dict())

        if classification.kind == INDETERMINATE:
            section.checks.append(CheckReport.failure(
                "classification",
                Witness(context={"identity": "classification", "series": list(series.coeffs)}),
                classification.reason))
        else:
            section.checks.append(CheckReport.success("classification", classification.label))
            if verify_certificate(classification, series):
                section.checks.append(CheckReport.success(
                    "certificate", "polynomial identity and Sturm counts replayed"))
            else:
                section.checks.append(CheckReport.failure(
                    "certificate",
                    Witness(context={"identity": "certificate", "signature": classification.signature}),
                    "the certificate does not replay"))

        if self.config.pade:
            fit = pade_fit(series, self.config.max_fit_degree)
            section.results["pade"] = fit.to_dict() if fit is not None else None
        return section

    def koszul_duality(self, ctx: ModelContext) -> Section:
        """Dual relations, dual series and the duality identity per sector."""
        model = ctx.model
        n = self.degree_for(model)
        mode = self.config.mode or "single"
        section = Section()
        dims: Dict[str, Any] = {}

        single = model.single_mode()
        single_rs = assemble_pgen(single)
        identity = self._koszul_sector(section, dims, "single", single, single_rs, n)
        pbw_passed = self._pbw_passes(single, single_rs)
        section.results["pbw_cubic_single"] = pbw_passed
        if pbw_passed and not identity.passed:
            alarm = "single-mode PBW cubic check passes but the Koszul identity fails"
            self.logger.warning(f"Consistency alarm: {alarm}")
            section.alarms.append(alarm)

        if mode in ("full", "both"):
            self._koszul_sector(section, dims, "full", model, ctx.rs, n)
        section.results["dual_dims"] = dims
        return section

    def _koszul_sector(self, section: Section, dims: Dict[str, Any], sector: str,
                       model: StatModel, rs: RelationSet, n: int) -> CheckReport:
        gram = model.gram_pair
        dual = self.koszul.dual_relations(rs, gram)
        g = self.hilbert.series_from_projector(rs.p_gen, rs.base_dim, n)
        g_dual = self.koszul.dual_series(dual, n)
        identity = self.koszul.check_koszul_identity(g, g_dual, n, sector=sector)
        identity.name = f"koszul_identity_{sector}"
        double = self.koszul.check_double_dual(rs, gram)
        double.name = f"double_dual_{sector}"
        section.series[sector] = g.to_dict()
        section.series[f"{sector}_dual"] = g_dual.to_dict()
        section.checks.extend([identity, double])
        dims[sector] = {"ambient": rs.ambient, "r_gen": rs.r_gen.dim, "r_perp": dual.r_perp.dim}
        return identity

    def _pbw_passes(self, model: StatModel, rs: RelationSet) -> Optional[bool]:
        try:
            return self.braid.pbw_cubic_check(model, rs).passed
        except OrderIncompatibleError as e:
            self.logger.info(f"PBW cross-check skipped: {e}")
            return None

    def fock_space(self, ctx: ModelContext) -> Section:
        """Truncated Fock space and its operator identities."""
        model, ex = ctx.model, ctx.exchange
        n = self.degree_for(model)
        fock = self.fock.build_fock(model, ctx.rs, n)
        section = Section()
        section.checks.extend([
            self.fock.vacuum_two_point(fock),
            self.fock.check_adjointness(fock),
            self.fock.check_quadratic_kill(fock),
            self.fock.check_level_positivity(fock),
            self.fock.number_operator_report(fock),
            self.fock.check_gld(fock),
        ])
        if ex is not None and ex.has("A") and ex.has("B"):
            section.checks.append(self.fock.check_ab_bracket(fock, ex))
        if ex is not None and any(ex.has(name) for name in ("C", "S", "R")):
            section.checks.append(self.fock.check_exchange_tensors(fock, ex))
        section.results = {"level_dims": fock.level_dims, "total_dim": fock.total_dim,
                           "n_max": fock.n_max}
        return section

    def report_all(self, ctx: ModelContext) -> Section:
        """The full pipeline; each command becomes one composite check."""
        parts = [
            ("validate", self.validate),
            ("yb", self.yb),
            ("hilbert", self.hilbert_series),
            ("classify", self.classify),
            ("koszul", self.koszul_duality),
            ("fock", self.fock_space),
        ]
        combined = Section()
        for name, handler in parts:
            part = handler(ctx)
            combined.checks.append(CheckReport.combine(name, part.checks))
            for key, block in part.series.items():
                combined.series.setdefault(key, block)
            if part.classification is not None:
                combined.classification = part.classification
            combined.alarms.extend(f"{name}: {alarm}" for alarm in part.alarms)
            combined.results[name] = part.results
            self.logger.info(f"{name}: {'passed' if part.passed else 'FAILED'}")
        return combined
