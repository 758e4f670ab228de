import json
import math
from fractions import Fraction

import pytest

from hardylab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstant:
    def test_copson_half_is_four(self, capsys):
        code, out, _ = run(capsys, "constant", "--copson", "1/2",
                           "--format", "text")
        assert code == 0
        assert "4" in out

    def test_copson_json_value(self, capsys):
        code, out, _ = run(capsys, "constant", "--copson", "0", "--format",
                           "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["schema"] == "hardy-lab/1"
        assert doc["command"] == "constant"
        assert doc["report"]["value"] == pytest.approx(math.e, rel=1e-15)

    def test_certified_interval(self, capsys):
        code, out, _ = run(capsys, "constant", "--arithmetic", "--weights",
                           "dyadic", "--N", "40", "--certified",
                           "--format", "json")
        assert code == 0
        doc = json.loads(out)
        rep = doc["report"]
        assert rep["direction"] == "interval"
        lo, hi = Fraction(rep["lower"]), Fraction(rep["upper"])
        assert lo < Fraction(16066951524150000, 10 ** 16) < hi
        assert float(hi - lo) < 1e-9

    def test_certified_text_uses_readable_floats(self, capsys):
        code, out, _ = run(capsys, "constant", "--arithmetic", "--weights",
                           "dyadic", "--N", "40", "--certified",
                           "--format", "text")
        assert code == 0
        assert "/" not in out.splitlines()[-1]  # no thousand-digit rationals
        assert "1.6066951524" in out

    def test_divergent_weights_cannot_certify(self, capsys):
        code, _, err = run(capsys, "constant", "--arithmetic", "--weights",
                           "ones", "--certified")
        assert code == 3
        assert "tail" in err


class TestEstimate:
    def test_finite_section_stays_under_cap(self, capsys):
        code, out, _ = run(capsys, "estimate", "--method", "finite",
                           "--mean", "power:1/2", "--weights", "dyadic",
                           "--N", "24", "--starts", "4", "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["kind"] == "finite-section"
        assert rep["direction"] == "lower_bound"
        assert 1.0 < rep["value"] < 4.0
        assert len(rep["witness"]) == 24

    def test_geometric_probe(self, capsys):
        code, out, _ = run(capsys, "estimate", "--method", "geometric-probe",
                           "--weights", "dyadic", "--q", "1/10", "--N", "60",
                           "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["value"] == pytest.approx(1.5032119559900965, abs=1e-15)

    def test_kedlaya_route(self, capsys):
        code, out, _ = run(capsys, "estimate", "--method", "kedlaya",
                           "--mean", "power:0", "--weights", "ones",
                           "--N", "2000", "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["kind"] == "substitution"
        assert rep["value"] == pytest.approx(math.e, rel=0.01)

    def test_nonweighted_limit(self, capsys):
        code, out, _ = run(capsys, "estimate", "--method", "nonweighted-limit",
                           "--mean", "power:0", "--N", "2000",
                           "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["value"] == pytest.approx(2.711875018209425, rel=1e-12)

    def test_kedlaya_refuses_convergent_weights(self, capsys):
        code, _, err = run(capsys, "estimate", "--method", "kedlaya",
                           "--mean", "power:0", "--weights", "dyadic",
                           "--N", "50")
        assert code == 3
        assert "diverge" in err


class TestVerifySubcommands:
    def test_axioms_pass_for_power_mean(self, capsys):
        code, out, _ = run(capsys, "verify", "axioms", "--mean", "power:1/2",
                           "--trials", "40", "--format", "text")
        assert code == 0
        assert "PASS" in out

    def test_jcin_single_instance_counterexample_exits_zero(self, capsys):
        code, out, _ = run(capsys, "verify", "jcin", "--mean", "power:2",
                           "--x", "1,3", "--w", "2,1", "--format", "json")
        assert code == 0  # informational: a counterexample is a finding
        rep = json.loads(out)["report"]
        assert rep["outcome"] == "counterexample_found"
        assert rep["margin"] == pytest.approx(-0.18280340794379923)

    def test_jcin_sweep_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "jcin", "--mean", "power:1",
                           "--trials", "25", "--format", "json")
        assert code == 0
        assert json.loads(out)["report"]["outcome"] == "pass"

    def test_cut_exact(self, capsys):
        code, out, _ = run(capsys, "verify", "cut", "--weights",
                           "geometric:1/2", "--blocks", "2,3,1",
                           "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["passed"] is True
        assert rep["details"]["mode"] == "arithmetic-exact"

    def test_cut_uniform_blocks_shorthand(self, capsys):
        code, out, _ = run(capsys, "verify", "cut", "--weights", "ones",
                           "--blocks", "3", "--N", "5", "--format", "json")
        assert code == 0
        assert json.loads(out)["report"]["passed"] is True

    def test_cut_mean_mode_requires_coarsening(self, capsys):
        code, _, err = run(capsys, "verify", "cut", "--mean", "power:2",
                           "--weights", "ones", "--blocks", "2", "--N", "4")
        assert code == 3
        assert "concave" in err or "coarsening" in err

    def test_decreasing_pass_and_refusal(self, capsys):
        code, out, _ = run(capsys, "verify", "decreasing", "--mean",
                           "arithmetic", "--x", "4,2,1", "--w", "1,1,1",
                           "--grid", "1,2,3", "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["passed"] and rep["margin"] == pytest.approx(2 / 3)

        code, _, err = run(capsys, "verify", "decreasing", "--mean",
                           "arithmetic", "--x", "1,3", "--w", "1,1",
                           "--grid", "1,2")
        assert code == 3
        assert "nonincreasing" in err

    def test_lsc_example_converges_at_full_depth(self, capsys):
        code, out, _ = run(capsys, "verify", "lsc-example", "--kmax", "25",
                           "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["converged"] is True
        assert rep["dip_positions"] == [1]

    def test_lsc_example_shallow_depth_fails(self, capsys):
        code, _, _ = run(capsys, "verify", "lsc-example", "--kmax", "5",
                         "--N", "40")
        assert code == 1

    def test_mu1_sweep_low_cap_fails(self, capsys):
        code, out, _ = run(capsys, "verify", "mu1-sweep", "--mean",
                           "power:1/2", "--trials", "2", "--N", "16",
                           "--cap", "1.0", "--starts", "3", "--format", "json")
        assert code == 1
        assert json.loads(out)["report"]["outcome"] == "fail"

    def test_mu1_sweep_small_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "mu1-sweep", "--mean",
                           "power:1/2", "--trials", "2", "--N", "16",
                           "--starts", "3", "--format", "json")
        assert code == 0
        assert json.loads(out)["report"]["passed"] is True


class TestExplore:
    def test_continuity_sweep_is_informational(self, capsys):
        code, out, _ = run(capsys, "explore", "continuity", "--mean",
                           "power:1/2", "--s-grid", "1/2,3/4", "--N", "16",
                           "--starts", "3", "--format", "json")
        assert code == 0
        rep = json.loads(out)["report"]
        assert len(rep["rows"]) == 2


class TestPlumbing:
    def test_json_output_is_byte_deterministic(self, capsys, monkeypatch):
        args = ("estimate", "--method", "finite", "--mean", "power:1/2",
                "--weights", "ones", "--N", "12", "--starts", "3",
                "--format", "json")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second
        monkeypatch.setenv("HARDY_THREADS", "4")
        _, threaded, _ = run(capsys, *args)
        assert threaded == first

    def test_no_timestamps_in_json(self, capsys):
        _, out, _ = run(capsys, "constant", "--copson", "1/2",
                        "--format", "json")
        doc = json.loads(out)
        assert "time" not in json.dumps(doc).lower()

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "verify", "lsc-example", "--kmax", "3",
                           "--N", "40", "--format", "csv")
        assert code == 1  # not converged at depth 3, still renders csv
        lines = out.strip().splitlines()
        assert lines[0] == "k,value"
        assert len(lines) == 4

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "constant", "--copson", "1/2",
                           "--format", "json", "--output", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["schema"] == "hardy-lab/1"

    def test_float_gate_blocks_float_literals(self, capsys):
        code, _, err = run(capsys, "verify", "jcin", "--mean", "power:1",
                           "--x", "1.5,2.5", "--w", "1,1")
        assert code == 2
        assert "--float" in err or "rational" in err

    def test_float_gate_opens_with_flag(self, capsys):
        code, out, _ = run(capsys, "verify", "jcin", "--float", "--mean",
                           "power:1", "--x", "1.5,2.5", "--w", "1,1",
                           "--format", "json")
        assert code == 0
        assert json.loads(out)["report"]["outcome"] == "pass"

    @pytest.mark.parametrize("argv", [
        ("constant", "--copson", "banana"),
        ("estimate", "--method", "finite", "--weights", "nonsense"),
        ("estimate", "--method", "finite", "--mean", "power:zzz"),
        ("verify", "jcin", "--mean", "power:1", "--x", "1,,2", "--w", "1,1"),
        ("verify", "cut", "--weights", "ones", "--blocks", "0"),
    ])
    def test_usage_errors_exit_two(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert "usage" in err or "hardy:" in err

    def test_argparse_rejects_unknown_method(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["estimate", "--method", "warp"])
        assert exc.value.code == 2

    def test_help_renders(self, capsys):
        for argv in (["--help"], ["constant", "--help"],
                     ["verify", "--help"]):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == 0
            assert "usage" in capsys.readouterr().out.lower()
