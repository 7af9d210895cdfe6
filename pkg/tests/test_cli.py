"""End-to-end tests of the command-line surface and its exit codes."""

import math
from pathlib import Path

import numpy as np
import pytest

from growthcast import load_series
from growthcast.cli import main
from growthcast.fileio import read_model, read_rates

DATA = Path(__file__).parent / "data"
GDP_FIXTURE = DATA / "gdp_per_capita.csv"
LOGISTIC_FIXTURE = DATA / "logistic_population.csv"


def write_exponential_series(path, r=0.02, n=50):
    t = np.arange(0.0, float(n))
    v = 100.0 * np.exp(r * t)
    lines = ["# label: expo\n# unit: u\nt,value\n"]
    lines += [f"{float(a)!r},{float(b)!r}\n" for a, b in zip(t, v)]
    Path(path).write_text("".join(lines), encoding="utf-8")


class TestRatesCommand:
    def test_direct_rates_constant_column(self, tmp_path, capsys):
        src = tmp_path / "s.csv"
        write_exponential_series(src)
        out = tmp_path / "r.csv"
        assert main(["rates", str(src), "--method", "direct", "--out", str(out)]) == 0
        rs, meta = read_rates(out)
        assert len(rs) == 49  # n - 1 rows
        np.testing.assert_allclose(rs.rates, math.exp(0.02) - 1.0, rtol=1e-12)
        assert meta["label"] == "expo"

    def test_even_window_usage_error(self, tmp_path):
        out = tmp_path / "r.csv"
        code = main(
            ["rates", str(GDP_FIXTURE), "--method", "refined", "--window", "2", "--out", str(out)]
        )
        assert code == 2

    def test_log_transform_with_zero_is_exit_3(self, tmp_path, capsys):
        src = tmp_path / "s.csv"
        src.write_text("t,value\n0,1.0\n1,0.0\n2,2.0\n", encoding="utf-8")
        out = tmp_path / "r.csv"
        code = main(["rates", str(src), "--transform", "log", "--out", str(out)])
        assert code == 3
        assert "log" in capsys.readouterr().err

    def test_refined_on_fixture(self, tmp_path):
        out = tmp_path / "r.csv"
        code = main(["rates", str(GDP_FIXTURE), "--method", "refined", "--out", str(out)])
        assert code == 0
        rs, meta = read_rates(out)
        assert len(rs) == 71  # refined spans every input point
        assert meta["method"] == "refined"


class TestFitCommand:
    def test_logistic_pipeline_recovers_kind(self, tmp_path):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(LOGISTIC_FIXTURE), "--out", str(rates)]) == 0
        model_file = tmp_path / "m.txt"
        code = main(["fit", str(rates), "--linearization", "r-vs-s", "--out", str(model_file)])
        assert code == 0
        m = read_model(model_file)
        assert m.kind.value == "linear_s"
        # fixture was generated with a = 0.06, b = -0.005; the direct
        # rates carry a finite-difference bias at the few-percent level
        assert m.params.a == pytest.approx(0.06, rel=0.05)
        assert m.params.b == pytest.approx(-0.005, rel=0.05)
        assert m.unit == "millions"

    def test_shifted_without_aux_is_usage_error(self, tmp_path, capsys):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(GDP_FIXTURE), "--out", str(rates)]) == 0
        code = main(["fit", str(rates), "--linearization", "shifted-ln-vs-t", "--out", str(tmp_path / "m.txt")])
        assert code == 2
        assert "aux-a" in capsys.readouterr().err

    def test_range_restriction_applies(self, tmp_path):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(GDP_FIXTURE), "--out", str(rates)]) == 0
        model_file = tmp_path / "m.txt"
        code = main([
            "fit", str(rates), "--linearization", "r-vs-t",
            "--range", "1990:2010", "--out", str(model_file),
        ])
        assert code == 0
        text = model_file.read_text()
        assert "n_points = 21" in text

    def test_recip_s_takes_series_input(self, tmp_path):
        src = tmp_path / "h.csv"
        t = np.linspace(0.0, 9.0, 40)
        lines = ["t,value\n"] + [f"{float(a)!r},{float(1.0/(10.0-a))!r}\n" for a in t]
        src.write_text("".join(lines), encoding="utf-8")
        model_file = tmp_path / "m.txt"
        code = main(["fit", str(src), "--linearization", "recip-s-vs-t", "--out", str(model_file)])
        assert code == 0
        m = read_model(model_file)
        assert m.kind.value == "hyperbolic"
        assert m.params.C == pytest.approx(10.0, rel=1e-9)
        assert m.params.b == pytest.approx(1.0, rel=1e-9)

    def test_size_dependent_fit_refuses_unit_mismatch(self, tmp_path, capsys):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(LOGISTIC_FIXTURE), "--out", str(rates)]) == 0
        code = main([
            "fit", str(rates), "--linearization", "r-vs-s",
            "--unit", "thousands", "--out", str(tmp_path / "m.txt"),
        ])
        assert code == 2
        assert "millions" in capsys.readouterr().err

    def test_scan_aux_selects_displacement(self, tmp_path):
        a0, b0, r0 = 10.0, 6.0, 0.25
        t = np.arange(0.0, 40.0)
        rates_path = tmp_path / "r.csv"
        lines = ["t,rate,size\n"]
        lines += [
            f"{float(x)!r},{float(1.0 / (a0 - b0 * math.exp(-r0 * x)))!r},1.0\n" for x in t
        ]
        rates_path.write_text("".join(lines), encoding="utf-8")
        model_file = tmp_path / "m.txt"
        code = main([
            "fit", str(rates_path), "--linearization", "shifted-ln-vs-t",
            "--scan-aux", "5:15", "--out", str(model_file),
        ])
        assert code == 0
        m = read_model(model_file)
        assert m.kind.value == "rate_shifted_exp"
        assert m.params.a == pytest.approx(a0, rel=1e-6)
        assert m.params.r == pytest.approx(r0, rel=1e-6)

    def test_log_transform_rates_lift_to_loglog(self, tmp_path):
        src = tmp_path / "s.csv"
        t = np.arange(0.0, 60.0)
        v = np.exp(np.exp(0.01 * t))  # ln S grows exponentially
        lines = ["t,value\n"] + [f"{float(a)!r},{float(b)!r}\n" for a, b in zip(t, v)]
        src.write_text("".join(lines), encoding="utf-8")
        rates = tmp_path / "r.csv"
        assert main(["rates", str(src), "--transform", "log", "--out", str(rates)]) == 0
        model_file = tmp_path / "m.txt"
        assert main(["fit", str(rates), "--linearization", "r-vs-t", "--out", str(model_file)]) == 0
        m = read_model(model_file)
        assert m.kind.value == "loglog_t"
        assert "lifted" in model_file.read_text()


class TestForecastCommand:
    def test_world_linear_forecast(self, tmp_path):
        model_file = tmp_path / "m.txt"
        model_file.write_text(
            "kind = linear_t\na = 0.252\nb = -0.0001197\nt_ref = 0.0\n", encoding="utf-8"
        )
        out = tmp_path / "p.csv"
        code = main([
            "forecast", str(model_file), "--anchor", "2030:8.4e9",
            "--grid", "2030:2110:5", "--out", str(out),
        ])
        assert code == 0
        text = out.read_text()
        assert "# feature: maximum" in text
        assert "t_star = 2105.2" in text

    def test_normalized_model_needs_no_anchor(self, tmp_path):
        model_file = tmp_path / "m.txt"
        model_file.write_text(
            "kind = rate_ln_linear\na = 21790000000.0\nb = -0.01406\nC = 15600000000.0\n",
            encoding="utf-8",
        )
        out = tmp_path / "p.csv"
        code = main(["forecast", str(model_file), "--grid", "2030:2100:10", "--out", str(out)])
        assert code == 0
        proj = load_series(out, "t", "value")
        assert proj.values[0] == pytest.approx(8.364e9, rel=1e-3)

    def test_grid_crossing_singularity_truncates_exit_0(self, tmp_path, capsys):
        model_file = tmp_path / "m.txt"
        model_file.write_text("kind = hyperbolic\nb = 1.0\nC = 10.0\n", encoding="utf-8")
        out = tmp_path / "p.csv"
        code = main(["forecast", str(model_file), "--grid", "0:20:1", "--out", str(out)])
        assert code == 0
        assert "truncated" in capsys.readouterr().err
        proj = load_series(out, "t", "value")
        assert proj.times[-1] < 10.0

    def test_non_positive_anchor_exit_3(self, tmp_path):
        model_file = tmp_path / "m.txt"
        model_file.write_text("kind = exp_const\na = 0.02\n", encoding="utf-8")
        code = main([
            "forecast", str(model_file), "--anchor", "0:-5",
            "--grid", "0:10:1", "--out", str(tmp_path / "p.csv"),
        ])
        assert code == 3

    def test_missing_anchor_on_unnormalized_model(self, tmp_path):
        model_file = tmp_path / "m.txt"
        model_file.write_text("kind = exp_const\na = 0.02\n", encoding="utf-8")
        code = main(["forecast", str(model_file), "--grid", "0:10:1", "--out", str(tmp_path / "p.csv")])
        assert code == 2


class TestIntegrateCommand:
    def test_discrete_reconstruction_round_trip(self, tmp_path):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(GDP_FIXTURE), "--out", str(rates)]) == 0
        out = tmp_path / "recon.csv"
        src = load_series(GDP_FIXTURE, "t", "value")
        anchor = f"{src.times[0]}:{src.values[0]}"
        code = main(["integrate", str(rates), "--anchor", anchor, "--out", str(out)])
        assert code == 0
        recon = load_series(out, "t", "value")
        np.testing.assert_allclose(recon.values, src.values, rtol=1e-12)

    def test_polynomial_route_respects_range(self, tmp_path):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(GDP_FIXTURE), "--out", str(rates)]) == 0
        code = main([
            "integrate", str(rates), "--anchor", "1960:7000", "--poly-degree", "3",
            "--grid", "1960:2100:5", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 3  # 2100 is outside the fitted rate range

    def test_polynomial_route_inside_range(self, tmp_path):
        rates = tmp_path / "r.csv"
        assert main(["rates", str(GDP_FIXTURE), "--method", "refined", "--out", str(rates)]) == 0
        out = tmp_path / "x.csv"
        code = main([
            "integrate", str(rates), "--anchor", "1960:7000", "--poly-degree", "6",
            "--grid", "1960:2015:5", "--out", str(out),
        ])
        assert code == 0
        recon = load_series(out, "t", "value")
        assert recon.values[0] == pytest.approx(7000.0, rel=1e-12)


class TestDiagnoseCommand:
    def test_identifies_logistic_fixture(self, tmp_path, capsys):
        code = main(["diagnose", str(LOGISTIC_FIXTURE)])
        assert code == 0
        out = capsys.readouterr().out
        assert "winner: linear_s" in out
        assert "stability:" in out

    def test_report_written_to_file(self, tmp_path):
        out = tmp_path / "report.txt"
        code = main(["diagnose", str(GDP_FIXTURE), "--out", str(out)])
        assert code == 0
        assert "winner:" in out.read_text()


class TestReproduceCommand:
    @pytest.mark.parametrize("case", ["world-pop", "japan-gdp", "uk-gdpcap"])
    def test_each_case_passes(self, tmp_path, capsys, case):
        code = main(["reproduce", case, "--out", str(tmp_path / "rep")])
        assert code == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "PASS" in out

    def test_unknown_case_lists_names(self, tmp_path, capsys):
        code = main(["reproduce", "atlantis", "--out", str(tmp_path / "rep")])
        assert code == 2
        err = capsys.readouterr().err
        for name in ("uk-gdpcap", "world-pop", "japan-gdp"):
            assert name in err

    def test_world_pop_table_contents(self, tmp_path, capsys):
        code = main(["reproduce", "world-pop", "--out", str(tmp_path / "rep")])
        assert code == 0
        table = (tmp_path / "rep" / "world-pop_scenarios.csv").read_text()
        assert "asymptotic" in table and "maximum" in table
        assert "indistinguishable,yes,yes" in table  # 2030 and 2050 agree
        report = (tmp_path / "rep" / "world-pop_report.txt").read_text()
        assert report.count("PASS") == 8

    def test_uk_report_has_integration_consistency(self, tmp_path):
        code = main(["reproduce", "uk-gdpcap", "--out", str(tmp_path / "rep")])
        assert code == 0
        report = (tmp_path / "rep" / "uk-gdpcap_report.txt").read_text()
        assert "line integration consistency" in report
        assert report.count("PASS") == 3

    def test_japan_report_footnotes_rounding(self, tmp_path):
        code = main(["reproduce", "japan-gdp", "--out", str(tmp_path / "rep")])
        assert code == 0
        report = (tmp_path / "rep" / "japan-gdp_report.txt").read_text()
        assert "2006" in report  # the published-year discrepancy is documented
        assert "PASS" in report


class TestDeterminism:
    def test_byte_identical_outputs(self, tmp_path):
        src = tmp_path / "s.csv"
        write_exponential_series(src)
        outs = []
        for run in ("a", "b"):
            rates = tmp_path / f"r_{run}.csv"
            model = tmp_path / f"m_{run}.txt"
            proj = tmp_path / f"p_{run}.csv"
            assert main(["rates", str(src), "--out", str(rates)]) == 0
            assert main(["fit", str(rates), "--linearization", "r-vs-t", "--out", str(model)]) == 0
            assert main([
                "forecast", str(model), "--anchor", "0:100", "--grid", "0:100:5", "--out", str(proj)
            ]) == 0
            outs.append((rates.read_bytes(), model.read_bytes(), proj.read_bytes()))
        assert outs[0] == outs[1]

    def test_pipes_compose_full_loop(self, tmp_path):
        # forecast output is itself a valid series file for cmd_rates
        model_file = tmp_path / "m.txt"
        model_file.write_text("kind = exp_const\na = 0.02\n", encoding="utf-8")
        proj = tmp_path / "p.csv"
        assert main(["forecast", str(model_file), "--anchor", "0:100", "--grid", "0:50:1", "--out", str(proj)]) == 0
        rates = tmp_path / "r.csv"
        assert main(["rates", str(proj), "--out", str(rates)]) == 0
        rs, _ = read_rates(rates)
        np.testing.assert_allclose(rs.rates, math.exp(0.02) - 1.0, rtol=1e-10)

    def test_sidecar_written(self, tmp_path):
        src = tmp_path / "s.csv"
        write_exponential_series(src)
        out = tmp_path / "r.csv"
        assert main(["rates", str(src), "--out", str(out)]) == 0
        meta = Path(str(out) + ".meta").read_text()
        assert "command: rates" in meta
