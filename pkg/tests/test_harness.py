import json

import numpy as np
import pytest

from levynet.cli import main
from levynet.csbp import simulate_csbp
from levynet.errors import DegenerateSampleError, ParameterError
from levynet.harness import RunConfig, TestRecord, VerificationReport, checks_for, load_config, run_suite
from levynet.harness.stats import binomial_se, ks_test, mean_ci, poisson_dispersion, two_sample_ks, z_score
from levynet.parallel import chunk_sizes, pmap
from levynet.rng import generator, seed_sequence, stream_id


def _square(x):
    return x * x


class TestStreams:
    def test_stable_and_distinct(self):
        a = generator(42, "csbp.laplace", 0).random(3)
        np.testing.assert_array_equal(a, generator(42, "csbp.laplace", 0).random(3))
        assert not np.array_equal(a, generator(42, "csbp.laplace", 1).random(3))
        assert not np.array_equal(a, generator(42, "csbp.extinction", 0).random(3))
        assert stream_id("x") == stream_id("x") != stream_id("y")
        assert seed_sequence(1, "x", 2).spawn_key == (stream_id("x"), 2)

    def test_pmap_order_and_chunks(self):
        assert pmap(_square, range(6), jobs=2) == [0, 1, 4, 9, 16, 25]
        assert chunk_sizes(10, 4) == [4, 4, 2]
        assert chunk_sizes(0, 4) == []

    def test_jobs_do_not_change_results(self):
        a = simulate_csbp(1.5, 1.0, [0.5], 3000, 5, chunk=1000, jobs=1)
        b = simulate_csbp(1.5, 1.0, [0.5], 3000, 5, chunk=1000, jobs=2)
        np.testing.assert_array_equal(a.values, b.values)


class TestStats:
    def test_ks_uniform(self, rng):
        D, p = ks_test(rng.random(1000), lambda x: x)
        assert 0 <= D <= 1 and p > 1e-3
        assert two_sample_ks(rng.random(500), rng.random(500))[1] > 1e-3

    def test_too_few_samples(self):
        with pytest.raises(ParameterError):
            ks_test(np.arange(5.0), lambda x: x)
        with pytest.raises(DegenerateSampleError):
            poisson_dispersion([0, 0, 0])

    def test_moments(self, rng):
        x = rng.poisson(3.0, 50_000)
        assert poisson_dispersion(x) == pytest.approx(1.0, abs=0.05)
        m, hw = mean_ci(x)
        assert m - hw < 3.0 < m + hw
        assert binomial_se(0.5, 100) == pytest.approx(0.05)
        assert abs(z_score(x, 3.0)) < 4


class TestConfig:
    def test_defaults_and_minima(self):
        c = RunConfig()
        assert c.seed == 42 and c.csbp_n == 100_000
        with pytest.raises(ParameterError):
            RunConfig(csbp_n=10)

    def test_flat_formats(self, tmp_path):
        (tmp_path / "a.json").write_text(json.dumps({"seed": 7, "threshold.csbp.ratio.1_3": 0.5}))
        (tmp_path / "b.cfg").write_text("# comment\nseed = 7\nthreshold.csbp.ratio.1_3 = 0.5\n")
        a, b = load_config(tmp_path / "a.json"), load_config(tmp_path / "b.cfg")
        assert a == b and a.threshold("csbp.ratio.1_3", 1.0) == 0.5
        (tmp_path / "c.cfg").write_text("sede = 7\n")
        with pytest.raises(ParameterError):
            load_config(tmp_path / "c.cfg")

    def test_round_trip(self):
        c = RunConfig(seed=3, overrides={"x.y": 2.0})
        assert RunConfig.from_mapping(c.to_dict()) == c


class TestReport:
    def test_comparators(self):
        r = lambda s, t, c: TestRecord("t", "a", s, t, c, 0).passed
        assert r(1, 2, "<=") and not r(3, 2, "<=") and r(1.5, (1, 2), "in") and r(0, 0, "==")
        assert not r(float("nan"), 1, "<=")

    def test_write(self, tmp_path):
        rec = TestRecord("t.one", "anchor", 0.5, 1.0, "<=", 42, csv_rows=[["x"], [1]])
        rep = VerificationReport("demo", 42, "0", [rec])
        rep.write(tmp_path)
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["body"]["records"][0]["verdict"] == "pass"
        assert (tmp_path / "t.one.csv").exists() and (tmp_path / "report.md").exists()


class TestSuites:
    def test_unknown_suite(self):
        with pytest.raises(ParameterError):
            checks_for("everything")

    def test_report_body_is_bitwise_reproducible(self, tmp_path):
        cfg = RunConfig(out=str(tmp_path / "a"))
        a = run_suite("characterization", cfg)
        b = run_suite("characterization", cfg.updated(out=str(tmp_path / "b")))
        ja = json.dumps(a.body(), sort_keys=True).replace(str(tmp_path / "a"), "")
        jb = json.dumps(b.body(), sort_keys=True).replace(str(tmp_path / "b"), "")
        assert ja == jb
        assert {r.criterion for r in a.records} == {1, 2}


class TestCli:
    def test_compute(self, capsys):
        assert main(["compute", "root"]) == 0
        assert json.loads(capsys.readouterr().out)["root"] == pytest.approx(1.5, abs=1e-9)
        assert main(["compute", "extinction", "--t", "2"]) == 0
        assert json.loads(capsys.readouterr().out)["survival"] == pytest.approx(0.6321205588)

    def test_simulate_to_file(self, tmp_path):
        out = tmp_path / "snake.json"
        assert main(["simulate", "snake", "--n", "64", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["n"] == 64

    def test_usage_errors(self, capsys):
        assert main(["compute", "i-alpha", "--alpha", "2.5"]) == 2
        assert main(["nonsense"]) == 2

    def test_verify_exit_code(self, tmp_path, capsys):
        # the characterization suite contains the monotonicity check, which fails
        assert main(["verify", "characterization", "--out", str(tmp_path)]) == 1
        assert (tmp_path / "report.json").exists()
