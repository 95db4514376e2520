import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from posteriorlab.cli import (
    InputError, build_parser, ed_visits_report, elicit_beta_report,
    facebook_report, main, read_count_series, storms_report, synthesize_storms,
)
from posteriorlab.mcmc import ChainConfig


def load_schema(name):
    ref = resources.files("posteriorlab") / "schemas" / name
    return json.loads(ref.read_text(encoding="utf-8"))


def run_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "posteriorlab.cli", *argv],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def write_storm_csv(path, seed=42, **kwargs):
    rows = synthesize_storms(kwargs.pop("n", 165), kwargs.pop("change_at", 40),
                             kwargs.pop("rate1", 4.0), kwargs.pop("rate2", 8.0),
                             seed)
    path.write_text("year,count\n" + "".join(f"{y},{c}\n" for y, c in rows),
                    encoding="utf-8")
    return path


class TestEdVisitsReport:
    def test_reference_numbers(self):
        r = ed_visits_report(80, 20, [2, 4, 3, 4, 2, 3, 3, 4, 3, 3],
                             draws=100_000, seed=42, levels=[0.05, 0.95])
        assert r["posterior"]["posterior"] == [111, 30]
        assert r["exact_interval"][0] == pytest.approx(3.142, abs=5e-4)
        assert r["exact_interval"][1] == pytest.approx(4.296, abs=5e-4)
        # exact value by quadrature is 0.29016; 1e5 draws lands close
        assert r["prob_at_most_two_visits"] == pytest.approx(0.29016, abs=0.002)
        assert abs(r["mc_interval"][0] - r["exact_interval"][0]) < 0.02
        assert abs(r["mc_interval"][1] - r["exact_interval"][1]) < 0.02

    def test_discrete_block(self):
        r = ed_visits_report(80, 20, [2, 4, 3, 4, 2, 3, 3, 4, 3, 3],
                             draws=1000, seed=1, levels=[0.05, 0.95],
                             discrete=True)
        d = r["discrete"]
        assert d["credible_set_95"]["values"] == [3.0, 3.5, 4.0]
        assert d["credible_set_95"]["coverage"] == pytest.approx(0.954, abs=1e-3)
        assert d["predictive_f0"] == pytest.approx(0.030, abs=5e-4)
        assert r["predictive_f0"] == d["predictive_f0"]

    def test_schema_valid(self):
        r = ed_visits_report(80, 20, [2, 4, 3], 1000, 1, [0.05, 0.95])
        jsonschema.validate(r, load_schema("ed_visits.json"))

    def test_empty_counts_rejected(self):
        with pytest.raises(InputError):
            ed_visits_report(80, 20, [], 1000, 1, [0.05, 0.95])

    def test_negative_counts_rejected(self):
        with pytest.raises(InputError):
            ed_visits_report(80, 20, [3, -1], 1000, 1, [0.05, 0.95])


class TestFacebookReport:
    def test_laplace_numbers(self):
        r = facebook_report(8, 30, 15, 30, "laplace", seed=42)
        assert r["laplace"]["mode"] == pytest.approx([-0.696, 0.431], abs=5e-4)
        assert r["laplace"]["cov"][0] == pytest.approx([0.137, -0.126], abs=1e-3)
        assert r["laplace"]["cov"][1] == pytest.approx([-0.126, 0.239], abs=1e-3)
        assert r["beta1_marginal"]["sd"] == pytest.approx(0.489, abs=5e-4)

    def test_grid_block_reports_right_skew(self):
        r = facebook_report(8, 30, 15, 30, "both", seed=42)
        g = r["grid_marginal_beta1"]
        assert g["right_skewed"] is True
        assert g["third_central_moment"] > 0
        assert g["mode_at"] == pytest.approx(0.431, abs=0.03)

    def test_schema_valid(self):
        r = facebook_report(8, 30, 15, 30, "both", seed=42)
        jsonschema.validate(r, load_schema("facebook.json"))

    def test_bad_counts_rejected(self):
        with pytest.raises(InputError):
            facebook_report(31, 30, 15, 30, "laplace", seed=1)

    def test_bad_method_rejected(self):
        with pytest.raises(InputError):
            facebook_report(8, 30, 15, 30, "exact", seed=1)


class TestReadCountSeries:
    def test_parses_year_count(self, tmp_path):
        f = tmp_path / "s.csv"
        f.write_text("year,count\n1851,3\n1852,5\n", encoding="utf-8")
        years, counts = read_count_series(str(f))
        assert years == [1851, 1852] and counts == [3, 5]

    def test_count_only_header(self, tmp_path):
        f = tmp_path / "s.csv"
        f.write_text("count\n3\n5\n", encoding="utf-8")
        years, counts = read_count_series(str(f))
        assert years == [None, None] and counts == [3, 5]

    def test_missing_count_column(self, tmp_path):
        f = tmp_path / "s.csv"
        f.write_text("year,value\n1851,3\n", encoding="utf-8")
        with pytest.raises(InputError):
            read_count_series(str(f))

    def test_bad_value(self, tmp_path):
        f = tmp_path / "s.csv"
        f.write_text("count\nthree\n", encoding="utf-8")
        with pytest.raises(InputError):
            read_count_series(str(f))

    def test_negative_value(self, tmp_path):
        f = tmp_path / "s.csv"
        f.write_text("count\n-3\n", encoding="utf-8")
        with pytest.raises(InputError):
            read_count_series(str(f))

    def test_missing_file(self):
        with pytest.raises(InputError):
            read_count_series("/nonexistent/storms.csv")


class TestStormsReport:
    HYPER = {"alpha1": 1.0, "beta1": 1.0, "alpha2": 1.0, "beta2": 1.0,
             "mu": 4.0, "sigma": 2.0}

    def test_gibbs_recovers_change_point(self):
        rows = synthesize_storms(165, 40, 4.0, 8.0, seed=42)
        years = [y for y, _ in rows]
        counts = [c for _, c in rows]
        cfg = ChainConfig(iter=2000, burnin=500, seed=42)
        r = storms_report(years, counts, "gibbs", self.HYPER, 2.0, cfg)
        assert abs(r["M_mode"] - 40) <= 3
        assert r["M_mode_year"] == 1851 + r["M_mode"] - 1
        assert r["params"]["lambda1"]["mean"] == pytest.approx(4.0, abs=0.5)
        assert r["params"]["lambda2"]["mean"] == pytest.approx(8.0, abs=0.5)
        jsonschema.validate(r, load_schema("storms.json"))

    def test_mwg_reports_acceptance(self):
        rows = synthesize_storms(165, 40, 4.0, 8.0, seed=42)
        counts = [c for _, c in rows]
        cfg = ChainConfig(iter=2000, burnin=500, seed=42)
        r = storms_report([None] * len(counts), counts, "mwg", self.HYPER,
                          2.0, cfg)
        assert 0.2 <= r["accept_rate_lambda1"] <= 0.4
        assert "M_mode_year" not in r

    def test_short_series_rejected(self):
        with pytest.raises(InputError):
            storms_report([], [5], "gibbs", self.HYPER, 2.0,
                          ChainConfig(iter=100))

    def test_unknown_sampler_rejected(self):
        with pytest.raises(InputError):
            storms_report([None, None], [1, 2], "hmc", self.HYPER, 2.0,
                          ChainConfig(iter=100))


class TestElicitBetaReport:
    def test_symmetric_case(self):
        r = elicit_beta_report(0.5, 0.9)
        assert r["a"] == pytest.approx(1.0, abs=1e-4)
        assert r["b"] == pytest.approx(1.0, abs=1e-4)
        jsonschema.validate(r, load_schema("elicit_beta.json"))

    def test_intervals_nested(self):
        r = elicit_beta_report(0.3, 0.6)
        c50, c90 = r["intervals"]["central50"], r["intervals"]["central90"]
        assert c90[0] < c50[0] < c50[1] < c90[1]

    def test_bad_ordering_rejected(self):
        with pytest.raises(InputError):
            elicit_beta_report(0.9, 0.5)


class TestSynthesizeStorms:
    def test_shape_and_determinism(self):
        a = synthesize_storms(50, 20, 3.0, 7.0, seed=9)
        b = synthesize_storms(50, 20, 3.0, 7.0, seed=9)
        assert a == b and len(a) == 50
        assert a[0][0] == 1851 and a[-1][0] == 1900

    def test_regime_means_differ(self):
        rows = synthesize_storms(400, 200, 3.0, 9.0, seed=10)
        counts = [c for _, c in rows]
        assert sum(counts[:200]) / 200 < sum(counts[200:]) / 200

    def test_bad_change_at(self):
        with pytest.raises(InputError):
            synthesize_storms(10, 10, 1.0, 2.0, seed=0)


class TestCliProcess:
    def test_ed_visits_byte_identical(self):
        rc1, out1, _ = run_cli("ed-visits", "--seed", "7", "--draws", "20000")
        rc2, out2, _ = run_cli("ed-visits", "--seed", "7", "--draws", "20000")
        assert rc1 == rc2 == 0
        assert out1 == out2
        json.loads(out1)  # well-formed

    def test_seed_changes_mc_outputs(self):
        _, out1, _ = run_cli("ed-visits", "--seed", "1", "--draws", "20000")
        _, out2, _ = run_cli("ed-visits", "--seed", "2", "--draws", "20000")
        a, b = json.loads(out1), json.loads(out2)
        assert a["exact_interval"] == b["exact_interval"]
        assert a["mc_interval"] != b["mc_interval"]

    def test_output_file(self, tmp_path):
        f = tmp_path / "r.json"
        rc, out, _ = run_cli("elicit-beta", "--median", "0.3", "--p90", "0.6",
                             "--output", str(f))
        assert rc == 0 and out == ""
        r = json.loads(f.read_text(encoding="utf-8"))
        assert r["command"] == "elicit-beta"

    def test_bad_input_exits_2(self):
        rc, out, err = run_cli("ed-visits", "--counts", "3,x,4")
        assert rc == 2 and out == ""
        assert "error:" in err

    def test_missing_storm_file_exits_2(self):
        rc, _, err = run_cli("storms", "--input", "/nope.csv", "--iter", "100")
        assert rc == 2 and "error:" in err

    def test_infeasible_elicitation_exits_2(self):
        rc, _, err = run_cli("elicit-beta", "--median", "0.6", "--p90", "0.4")
        assert rc == 2 and "error:" in err

    def test_storms_pipeline(self, tmp_path):
        f = write_storm_csv(tmp_path / "storms.csv")
        rc, out, _ = run_cli("storms", "--input", str(f), "--iter", "500",
                             "--burnin", "100", "--seed", "3")
        assert rc == 0
        r = json.loads(out)
        assert r["sampler"] == "gibbs" and r["n"] == 165

    def test_synthesize_storms_csv(self):
        rc, out, _ = run_cli("synthesize-storms", "--n", "10", "--change-at",
                             "4", "--seed", "5")
        assert rc == 0
        lines = out.strip().split("\n")
        assert lines[0] == "year,count" and len(lines) == 11

    def test_main_in_process(self, capsys):
        assert main(["elicit-beta", "--median", "0.3", "--p90", "0.6"]) == 0
        out = capsys.readouterr().out
        assert json.loads(out)["command"] == "elicit-beta"

    def test_version_flag(self):
        rc, out, _ = run_cli("--version")
        assert rc == 0 and out.strip()


class TestParser:
    def test_defaults(self):
        args = build_parser().parse_args(["ed-visits"])
        assert args.alpha == 80.0 and args.beta == 20.0 and args.seed == 42

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["unknown"])
