import json
import math
from importlib import resources

import jsonschema
import pytest

from knotflow.cli import main
from knotflow.expressions import parse_expression, parse_tuple


def load_schema(name):
    with resources.files("knotflow.schemas").joinpath(name).open() as fh:
        return json.load(fh)


def run(argv):
    return main(argv)


class TestExpressions:
    def test_pi_literals(self):
        assert parse_expression("pi/2") == pytest.approx(math.pi / 2)
        assert parse_expression("3*pi/4 - 1") == pytest.approx(3 * math.pi / 4 - 1)
        assert parse_expression("-0.5") == -0.5
        assert parse_expression("(1+2)/4") == 0.75

    def test_rejects_everything_else(self):
        for bad in ["__import__('os')", "pi**2", "x", "1;2", ""]:
            with pytest.raises(ValueError):
                parse_expression(bad)

    def test_tuple(self):
        assert parse_tuple("pi,0,1", 3) == pytest.approx((math.pi, 0.0, 1.0))
        with pytest.raises(ValueError):
            parse_tuple("1,2", 3)


class TestBeltramiCheck:
    def test_nonsingular_exit_zero(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(
            ["beltrami", "check", "--A", "1", "--B", "0.5", "--C", "0",
             "--samples", "50", "--grid-n", "16", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text())
        jsonschema.validate(report, load_schema("beltrami_check.json"))
        assert report["pass"] is True
        assert report["residuals"]["curl_sup"] < 1e-6

    def test_singular_exit_one(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run(
            ["beltrami", "check", "--A", "1", "--B", "1", "--C", "0.5",
             "--samples", "20", "--grid-n", "16", "--out", str(out)]
        )
        assert code == 1
        report = json.loads(out.read_text())
        assert report["singularity"]["nonsingular"] is False
        assert "singular" in capsys.readouterr().err

    def test_determinism(self, tmp_path):
        args = ["beltrami", "check", "--A", "1", "--B", "0.4", "--C", "0.2",
                "--samples", "40", "--grid-n", "16", "--seed", "7"]
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert run(args + ["--out", str(out1)]) == 0
        assert run(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestFlowCommands:
    def test_integrate_csv_and_plot(self, tmp_path):
        out = tmp_path / "traj.csv"
        plot = tmp_path / "traj.png"
        code = run(
            ["flow", "integrate", "--A", "1", "--B", "0.5", "--C", "0",
             "--x0", "pi/2,0,0", "--t-end", "pi", "--out", str(out), "--plot", str(plot)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,x,y,z"
        assert len(lines) > 3
        assert plot.stat().st_size > 1000

    def test_orbit_json(self, tmp_path):
        out = tmp_path / "orbit.json"
        code = run(
            ["flow", "orbit", "--A", "1", "--B", "0.5", "--C", "0",
             "--section", "y=0", "--direction", "-1", "--guess", "1.5,3.0",
             "--out", str(out)]
        )
        assert code == 0
        orbit = json.loads(out.read_text())
        jsonschema.validate(orbit, load_schema("periodic_orbit.json"))
        assert orbit["period"] == pytest.approx(4 * math.pi, abs=1e-6)
        assert orbit["classification"] == "hyperbolic"

    def test_orbit_failure_removes_partial_output(self, tmp_path):
        out = tmp_path / "orbit.json"
        code = run(
            ["flow", "orbit", "--A", "1", "--B", "0.5", "--C", "0.05",
             "--section", "y=0", "--direction", "-1", "--guess", "2.2,2.1",
             "--out", str(out)]
        )
        assert code == 1
        assert not out.exists()
        assert list(tmp_path.iterdir()) == []

    def test_splitting_csv(self, tmp_path):
        out = tmp_path / "split.csv"
        code = run(
            ["flow", "splitting", "--B", "0.5", "--C", "0.025",
             "--samples", "12", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# C=")
        assert lines[1] == "section_param,signed_distance"
        assert len(lines) == 14


class TestContactAnnulus:
    def test_roundtrip_report(self, tmp_path, capsys):
        out = tmp_path / "annulus.csv"
        code = run(
            ["contact", "annulus", "--monodromy", "rot:-2", "--eps", "1",
             "--grid", "64,17", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        jsonschema.validate(report, load_schema("annulus_report.json"))
        assert report["roundtrip_error"] < 1e-4
        assert report["transverse"] is True
        header = out.read_text().splitlines()[0]
        assert header == "theta,z,r"

    def test_bad_monodromy_is_invalid_input(self):
        assert run(["contact", "annulus", "--monodromy", "weird:1"]) == 2


class TestTemplateCommands:
    def test_words(self, capsys):
        assert run(["template", "words", "--max-len", "3"]) == 0
        assert capsys.readouterr().out.split() == ["x", "y", "xy", "xxy", "xyy"]

    def test_knots_jsonl_contains_trefoil(self, tmp_path):
        out = tmp_path / "knots.jsonl"
        code = run(
            ["template", "knots", "--m", "0", "--n", "0", "--max-len", "5",
             "--out", str(out)]
        )
        assert code == 0
        schema = load_schema("knot_report.json")
        reports = [json.loads(line) for line in out.read_text().splitlines()]
        for report in reports:
            jsonschema.validate(report, schema)
        trefoil = [r for r in reports if r["word"] == "xyxyy"]
        assert trefoil and trefoil[0]["name"] == "trefoil (right-handed)"

    def test_link_values(self, capsys):
        assert run(["template", "link", "--m", "0", "--n", "-1", "--w1", "xy", "--w2", "y"]) == 0
        assert capsys.readouterr().out.strip() == "-1"
        assert run(["template", "link", "--m", "0", "--n", "1", "--w1", "xy", "--w2", "y"]) == 0
        assert capsys.readouterr().out.strip() == "1"

    def test_same_orbit_is_invalid_input(self):
        assert run(["template", "link", "--m", "0", "--n", "0", "--w1", "xy", "--w2", "yx"]) == 2

    def test_curves_csv(self, tmp_path):
        out = tmp_path / "curves.csv"
        code = run(
            ["template", "curves", "--m", "0", "--n", "-1", "--words", "xy,y",
             "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "word,vertex,x,y,z"
        words_seen = {line.split(",")[0] for line in lines[1:]}
        assert words_seen == {"xy", "y"}


class TestTightReeb:
    def test_json(self, capsys):
        assert run(["tight", "reeb", "--point", "1,0,0,0"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["reeb"] == [-0.0, 2.0, -0.0, 0.0]
        assert data["pairing"] == 1.0

    def test_off_sphere_is_invalid_input(self):
        assert run(["tight", "reeb", "--point", "1,1,0,0"]) == 2


class TestInvocation:
    def test_unknown_flag_exits_two(self):
        assert run(["template", "words", "--max-len", "3", "--bogus", "1"]) == 2

    def test_bad_expression_exits_two(self):
        assert run(["tight", "reeb", "--point", "one,0,0,0"]) == 2

    def test_config_file_sets_defaults(self, tmp_path):
        cfg = tmp_path / "check.cfg"
        cfg.write_text("samples=33\ngrid-n=16\n")
        out = tmp_path / "report.json"
        code = run(
            ["--config", str(cfg), "beltrami", "check",
             "--A", "1", "--B", "0.5", "--C", "0", "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text())["samples"] == 33

    def test_config_explicit_flag_wins(self, tmp_path):
        cfg = tmp_path / "check.cfg"
        cfg.write_text("samples=33\n")
        out = tmp_path / "report.json"
        code = run(
            ["--config", str(cfg), "beltrami", "check", "--A", "1", "--B", "0.5",
             "--C", "0", "--samples", "21", "--grid-n", "16", "--out", str(out)]
        )
        assert code == 0
        assert json.loads(out.read_text())["samples"] == 21

    def test_config_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "check.cfg"
        cfg.write_text("bogus=1\n")
        code = run(
            ["--config", str(cfg), "beltrami", "check", "--A", "1", "--B", "0.5", "--C", "0"]
        )
        assert code == 2

    def test_outdir_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KNOTFLOW_OUTDIR", str(tmp_path))
        assert run(["template", "words", "--max-len", "2", "--out", "words.txt"]) == 0
        assert (tmp_path / "words.txt").read_text().split() == ["x", "y", "xy"]

    def test_run_config_resolution(self, tmp_path, monkeypatch):
        from knotflow.cli import RunConfig, build_parser

        monkeypatch.setenv("KNOTFLOW_OUTDIR", str(tmp_path))
        args = build_parser().parse_args(
            ["template", "words", "--max-len", "2", "--out", "w.txt"]
        )
        config = RunConfig.from_args(args)
        assert config.command == ("template", "words")
        assert config.out == str(tmp_path / "w.txt")
        assert config.options["max_len"] == 2
