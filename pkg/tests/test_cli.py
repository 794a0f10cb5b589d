"""End-to-end tests for the quadstat command line and report replay."""

import json
import sys

import pytest

import quadstat
from src.commands import EXIT_FAILURE, EXIT_INPUT_ERROR, EXIT_OK, QuadstatCommands
from src.config import GUARD_ENV_VAR, Config
from src.model_file import default_preset_set, parse_model_document, preset_filename
from src.replay import MISMATCH, REPRODUCED, WitnessReplayer


def run_cli(monkeypatch, *argv):
    monkeypatch.setattr(sys, "argv", ["quadstat.py", *argv])
    return quadstat.main()


def write_json(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def load_preset_json(presets_dir, name, d):
    return json.loads((presets_dir / preset_filename(name, d)).read_text(encoding="utf-8"))


@pytest.fixture(autouse=True)
def clean_guard_env(monkeypatch):
    monkeypatch.delenv(GUARD_ENV_VAR, raising=False)


class TestValidate:
    def test_boson_rank(self, presets_dir):
        result = QuadstatCommands(Config()).run("validate", presets_dir / "boson.d2.json")
        assert result.exit_code == EXIT_OK
        assert result.report["results"]["rank"] == {"sym": 0, "ext": 1, "total": 1}
        assert result.report["passed"]

    def test_singlet_sizes(self, presets_dir):
        result = QuadstatCommands(Config()).run("validate", presets_dir / "singlet_pair.d2.json")
        assert result.exit_code == EXIT_OK
        assert result.report["results"]["w_sym_dim"] == 8
        assert result.report["results"]["rank"]["total"] == 24

    def test_asymmetric_form_is_an_input_error(self, monkeypatch, tmp_path, presets_dir):
        document = load_preset_json(presets_dir, "singlet_pair", 1)
        document["model"]["g"][1] = "1"
        path = write_json(tmp_path / "bad.json", document)
        assert run_cli(monkeypatch, "validate", str(path)) == EXIT_INPUT_ERROR

    def test_float_is_an_input_error(self, monkeypatch, tmp_path, presets_dir):
        document = load_preset_json(presets_dir, "boson", 2)
        document["model"]["g"] = [1.0]
        path = write_json(tmp_path / "float.json", document)
        assert run_cli(monkeypatch, "validate", str(path)) == EXIT_INPUT_ERROR

    def test_missing_file(self, monkeypatch, tmp_path):
        assert run_cli(monkeypatch, "validate", str(tmp_path / "absent.json")) == EXIT_INPUT_ERROR


class TestCommands:
    def test_hilbert_completed_model(self, monkeypatch, presets_dir, tmp_path):
        out = tmp_path / "hilbert.json"
        code = run_cli(monkeypatch, "hilbert", str(presets_dir / "singlet_pair_completed.d2.json"),
                       "--degree", "4", "--out", str(out))
        assert code == EXIT_OK
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["series"]["full"]["coeffs"] == [1, 6, 11, 6, 1]
        assert report["series"]["single"]["terminated_at"] == 3

    def test_hilbert_factorization_failure(self, monkeypatch, presets_dir):
        code = run_cli(monkeypatch, "hilbert", str(presets_dir / "singlet_pair.d2.json"),
                       "--degree", "2")
        assert code == EXIT_FAILURE

    def test_single_mode_only(self, presets_dir):
        result = QuadstatCommands(Config(mode="single")).run("hilbert",
                                                             presets_dir / "singlet_pair.d2.json")
        assert result.exit_code == EXIT_OK
        assert set(result.report["series"]) == {"single"}

    def test_yb_singlet_fails(self, monkeypatch, presets_dir):
        assert run_cli(monkeypatch, "yb", str(presets_dir / "singlet_pair.d1.json")) == EXIT_FAILURE

    def test_yb_bosons_pass_on_the_pbw_certificate(self, presets_dir):
        commands = QuadstatCommands(Config())
        result = commands.run("yb", presets_dir / "boson.d2.json")
        assert "global_yb (advisory)" in commands.output.render_summary(result.report)
        assert result.exit_code == EXIT_OK
        children = {c["name"]: c for c in result.report["checks"][0]["children"]}
        assert children["pbw_cubic"]["passed"]
        assert children["global_yb"]["advisory"] is True
        assert not children["global_yb"]["passed"]
        assert "values {-1/8, 1/8}" in children["global_yb"]["details"]
        assert len(result.report["alarms"]) == 2

    def test_classify_boson(self, presets_dir):
        result = QuadstatCommands(Config(degree=8, pade=True)).run("classify",
                                                                  presets_dir / "boson.d1.json")
        assert result.exit_code == EXIT_OK
        assert result.report["classification"]["label"] == "[1,-1]_+"
        assert result.report["results"]["pade"] == {"numerator": ["1"], "denominator": ["1", "-1"]}

    def test_classify_needs_enough_coefficients(self, monkeypatch, presets_dir):
        code = run_cli(monkeypatch, "classify", str(presets_dir / "boson.d1.json"), "--degree", "4")
        assert code == EXIT_INPUT_ERROR

    def test_koszul_singlet(self, presets_dir):
        result = QuadstatCommands(Config()).run("koszul", presets_dir / "singlet_pair.d2.json")
        assert result.exit_code == EXIT_OK
        assert result.report["series"]["single_dual"]["coeffs"] == [1, 3, 8, 21, 55]
        assert result.report["results"]["pbw_cubic_single"] is False
        assert result.report["alarms"] == []

    def test_fock_fermions(self, presets_dir):
        result = QuadstatCommands(Config(degree=3)).run("fock", presets_dir / "fermion.d3.json")
        assert result.exit_code == EXIT_OK
        assert result.report["results"]["level_dims"] == [1, 3, 3, 1]
        names = [check["name"] for check in result.report["checks"]]
        assert "ab_bracket" in names and "exchange_tensors" in names


class TestReportAll:
    def test_report_is_deterministic(self, monkeypatch, presets_dir, tmp_path):
        reports = []
        for run in ("first", "second"):
            out = tmp_path / f"{run}.json"
            code = run_cli(monkeypatch, "report-all", str(presets_dir / "fermion.d2.json"),
                           "--degree", "4", "--out", str(out))
            assert code == EXIT_OK
            report = json.loads(out.read_text(encoding="utf-8"))
            report.pop("timing")
            reports.append(report)
        assert reports[0] == reports[1]
        assert [c["name"] for c in reports[0]["checks"]] == [
            "validate", "yb", "hilbert", "classify", "koszul", "fock"]
        assert all(c["passed"] for c in reports[0]["checks"])
        assert reports[0]["alarms"] == [
            "yb: global Yang-Baxter check fails but the PBW cubic check passes",
            "yb: global Yang-Baxter check fails but the internal braid checks pass",
        ]

    def test_replay_reproduces_witnesses(self, monkeypatch, presets_dir, tmp_path):
        out = tmp_path / "singlet.json"
        code = run_cli(monkeypatch, "report-all", str(presets_dir / "singlet_pair.d1.json"),
                       "--out", str(out))
        assert code == EXIT_FAILURE
        outcomes = WitnessReplayer(Config()).replay_file(out)
        assert outcomes
        assert all(o.status != MISMATCH for o in outcomes)
        assert any(o.identity == "global_yb" and o.status == REPRODUCED for o in outcomes)
        assert run_cli(monkeypatch, "--replay", str(out)) == EXIT_OK

    def test_tampered_witness_is_a_mismatch(self, monkeypatch, presets_dir, tmp_path):
        out = tmp_path / "yb.json"
        run_cli(monkeypatch, "yb", str(presets_dir / "singlet_pair.d1.json"), "--out", str(out))
        report = json.loads(out.read_text(encoding="utf-8"))
        global_yb = next(c for c in report["checks"][0]["children"] if c["name"] == "global_yb")
        global_yb["witness"]["difference"]["entries"][0][1] = "99"
        tampered = write_json(tmp_path / "tampered.json", report)
        assert run_cli(monkeypatch, "--replay", str(tampered)) == EXIT_FAILURE

    def test_replay_of_garbage(self, monkeypatch, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("{not json", encoding="utf-8")
        assert run_cli(monkeypatch, "--replay", str(path)) == EXIT_INPUT_ERROR


class TestPresets:
    def test_generated_presets_match_shipped_files(self, monkeypatch, presets_dir, tmp_path):
        assert run_cli(monkeypatch, "preset", "--all", "--out", str(tmp_path)) == EXIT_OK
        for name, d in default_preset_set():
            generated = parse_model_document(
                json.loads((tmp_path / preset_filename(name, d)).read_text(encoding="utf-8")))
            shipped = parse_model_document(load_preset_json(presets_dir, name, d))
            assert generated.model.g == shipped.model.g
            assert generated.model.w_sym == shipped.model.w_sym
            assert generated.model.w_ext == shipped.model.w_ext
            assert generated.model.n_max == shipped.model.n_max
            assert generated.model.name == shipped.model.name
            assert generated.exchange == shipped.exchange

    def test_single_preset(self, monkeypatch, tmp_path):
        target = tmp_path / "b.json"
        assert run_cli(monkeypatch, "preset", "boson", "--d", "2", "--out", str(target)) == EXIT_OK
        assert parse_model_document(json.loads(target.read_text(encoding="utf-8"))).model.d == 2

    def test_worked_example_alias(self, monkeypatch, tmp_path, presets_dir):
        target = tmp_path / "example.json"
        code = run_cli(monkeypatch, "preset", "example_sec5", "--d", "1", "--out", str(target))
        assert code == EXIT_OK
        written = parse_model_document(json.loads(target.read_text(encoding="utf-8"))).model
        shipped = parse_model_document(load_preset_json(presets_dir, "singlet_pair", 1)).model
        assert written.w_sym == shipped.w_sym
        assert written.name == "singlet_pair.d1"


class TestGuards:
    def guarded_model(self, presets_dir, tmp_path, limit):
        document = load_preset_json(presets_dir, "boson", 2)
        document["guards"] = {"max_ambient_dim": limit}
        return write_json(tmp_path / "guarded.json", document)

    def test_file_guard_stops_run(self, monkeypatch, presets_dir, tmp_path):
        path = self.guarded_model(presets_dir, tmp_path, 10)
        assert run_cli(monkeypatch, "hilbert", str(path)) == EXIT_INPUT_ERROR

    def test_flag_overrides_file_guard(self, monkeypatch, presets_dir, tmp_path):
        path = self.guarded_model(presets_dir, tmp_path, 10)
        assert run_cli(monkeypatch, "hilbert", str(path), "--guard-dim", "100") == EXIT_OK

    def test_environment_guard(self, monkeypatch, presets_dir):
        monkeypatch.setenv(GUARD_ENV_VAR, "10")
        assert run_cli(monkeypatch, "hilbert", str(presets_dir / "boson.d2.json")) == EXIT_INPUT_ERROR
        config = Config.from_env()
        assert (config.guard_dim, config.guard_source) == (10, "env")

    def test_file_guard_overrides_environment(self, monkeypatch):
        monkeypatch.setenv(GUARD_ENV_VAR, "10")
        config = Config.from_env()
        config.adopt_file_guard(500)
        assert (config.guard_dim, config.guard_source) == (500, "file")
        flagged = Config.from_env(guard_dim=50)
        flagged.adopt_file_guard(500)
        assert flagged.guard_dim == 50
