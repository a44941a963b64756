import json
import math

import pytest

from manytoone import serialization
from manytoone.cli import db_to_linear, run
from manytoone.optimality import Certificate
from manytoone.rates import RateReport


@pytest.fixture
def ch_file(tmp_path):
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"form": "standard", "K": 3, "h": [0.5, 0.5], "P": [1, 1, 1]}))
    return str(path)


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestAnalyze:
    def test_m1(self, capsys, ch_file):
        code, out, _ = invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "M1")
        assert code == 0
        doc = json.loads(out)
        assert doc["report"]["sum_rate_bits"] == pytest.approx(1.36848, abs=5e-6)
        t1 = [c for c in doc["certificates"] if c["theorem_id"] == "T1"]
        assert t1 and t1[0]["holds"]

    @pytest.mark.parametrize("strategy", ["MAC:1,2", "MI:2,3@2,3", "M2:3", "M3", "MI1"])
    def test_strategy_forms(self, capsys, ch_file, strategy):
        code, out, _ = invoke(capsys, "analyze", "--channel", ch_file, "--strategy", strategy)
        assert code == 0 and "sum_rate_bits" in out

    def test_round_trip(self, capsys, ch_file, tmp_path):
        out1 = invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "M3")[1]
        doc = serialization.loads(out1)
        report = RateReport.from_dict(doc["report"])
        certs = [Certificate.from_dict(c) for c in doc["certificates"]]
        again = {"channel": doc["channel"], "report": report.to_dict(), "certificates": [c.to_dict() for c in certs]}
        assert serialization.dumps(again) == out1
        # the embedded channel is itself a valid fixture
        fixture = tmp_path / "fixture.json"
        fixture.write_text(json.dumps(doc["channel"]))
        assert invoke(capsys, "analyze", "--channel", str(fixture), "--strategy", "M3")[1] == out1

    def test_twelve_digits(self, capsys, tmp_path):
        path = tmp_path / "ch.json"
        path.write_text(json.dumps({"form": "standard", "K": 3, "h": [0.123456789012345, 0.3], "P": [1, 2, 3]}))
        doc = json.loads(invoke(capsys, "analyze", "--channel", str(path), "--strategy", "M1")[1])
        assert doc["channel"]["h"][0] == 0.123456789012

    def test_power_overrides(self, capsys, ch_file):
        lin = json.loads(invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "M1", "--powers", "2")[1])
        db = json.loads(invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "M1", "--powers-db", "3,3,3")[1])
        assert lin["channel"]["P"] == [2.0] * 3
        assert db["channel"]["P"] == [serialization.round_sig(db_to_linear(3))] * 3

    def test_raw_channel(self, capsys, tmp_path):
        path = tmp_path / "raw.json"
        path.write_text(json.dumps({
            "form": "raw", "K": 3, "P": [1, 1, 1], "direct_gains": [1, 2, 2],
            "cross_gains_to_rx1": [1, 1], "noise_vars": [1, 1, 1],
        }))
        doc = json.loads(invoke(capsys, "analyze", "--channel", str(path), "--strategy", "M1")[1])
        assert doc["channel"]["h"] == [0.5, 0.5] and doc["channel"]["P"] == [1.0, 4.0, 4.0]


class TestRecommend:
    @pytest.mark.parametrize("mode, label", [("XC", "M1"), ("IC", "MI1")])
    def test_low_interference(self, capsys, ch_file, mode, label):
        code, out, _ = invoke(capsys, "recommend", "--channel", ch_file, "--mode", mode)
        doc = json.loads(out)
        assert code == 0 and doc["best"]["strategy"]["label"] == label


class TestRhoDelta:
    def test_example(self, capsys):
        code, out, _ = invoke(capsys, "rho-delta", "--b", "1.5", "--p3", "1", "--delta", "0:1:0.5")
        rows = [tuple(map(float, l.split(","))) for l in out.splitlines()[1:]]
        assert code == 0 and out.startswith("delta_bits,rho2\n")
        assert rows[0] == (0, 0) and rows[2] == (1, 0.8125)
        assert rows[1][1] == pytest.approx(0.59091, abs=5e-6)

    def test_db(self, capsys):
        a = invoke(capsys, "rho-delta", "--b", "1.5", "--p3-db", "10", "--delta", "0:1:0.5")[1]
        b = invoke(capsys, "rho-delta", "--b", "1.5", "--p3", "10", "--delta", "0:1:0.5")[1]
        assert a == b


class TestScan:
    def test_writes_csv(self, capsys, ch_file, tmp_path):
        out = tmp_path / "region.csv"
        code = run(["scan", "--channel", ch_file, "--vary", "h2,h3", "--range", "0:3:0.1",
                    "--labels", "T1,T2,T3@rho2=0.59,T5,best", "--out", str(out)])
        text = out.read_text()
        assert code == 0 and text.startswith("x,y,labels,best_strategy,best_sum_rate_bits\n")
        assert len(text.splitlines()) == 901

    def test_deltas_and_trace(self, capsys, tmp_path):
        trace = tmp_path / "trace.csv"
        code, out, _ = invoke(capsys, "scan", "--range", "0:3:0.1", "--labels", "T1", "--deltas", "0.5",
                              "--trace", "T1", "--trace-out", str(trace))
        assert code == 0 and "T3@delta=0.5" in out
        lines = trace.read_text().splitlines()
        assert lines[0] == "polyline,x,y"
        for line in lines[1:]:
            _, x, y = map(float, line.split(","))
            assert abs(math.hypot(x, y) - 1) <= 0.1

    def test_deterministic(self, capsys, tmp_path):
        args = ["scan", "--range", "0:3:0.05", "--labels", "T1,T8,best", "--powers-db", "3"]
        first = invoke(capsys, *args)[1]
        assert invoke(capsys, *args, "--workers", "2")[1] == first


class TestVerify:
    def test_exact_suite(self, capsys):
        code, out, _ = invoke(capsys, "verify", "--suite", "exact", "--trials", "20")
        assert code == 0
        for line in out.splitlines():
            assert line.startswith("PASS ") and " lhs=" in line and " rhs=" in line and " tol=" in line

    def test_deterministic(self, capsys):
        args = ["verify", "--suite", "mc", "--samples", "20000"]
        assert invoke(capsys, *args) == invoke(capsys, *args)

    def test_failure_exit_code(self, capsys, monkeypatch):
        from manytoone import cli
        from manytoone.verification import CheckResult

        monkeypatch.setattr(cli, "run_suite", lambda *a: [CheckResult("broken", 1.0, 0.0, 1e-9)])
        code, out, _ = invoke(capsys, "verify")
        assert code == 2 and out.startswith("FAIL broken")


class TestErrors:
    @pytest.mark.parametrize("argv, needle", [
        (["analyze", "--bogus"], "--bogus"),
        (["frobnicate"], "frobnicate"),
        (["analyze", "--strategy", "M1"], "--channel"),
        (["rho-delta", "--b", "1.5", "--p3", "1", "--delta", "0:1"], "--delta"),
        (["rho-delta", "--b", "1.5", "--delta", "0:1:0.5"], "--p3"),
        (["scan", "--vary", "h2"], "--vary"),
        (["scan", "--vary", "h2,h9"], "h9"),
        (["scan", "--range", "0:1:0.00001"], "exceeds"),
        (["scan", "--labels", "T1", "--trace", "T5"], "--trace"),
        (["verify", "--tol", "0"], "--tol"),
        (["verify", "--suite", "fast"], "fast"),
    ])
    def test_input_errors(self, capsys, argv, needle):
        code, _, err = invoke(capsys, *argv)
        assert code == 1
        assert err.startswith("error: ") and needle in err and err.count("\n") == 1

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = invoke(capsys, "analyze", "--channel", str(path), "--strategy", "M1")
        assert code == 1 and err.startswith("error: ")

    def test_unknown_key(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"form": "standard", "K": 3, "h": [0, 0], "P": [1, 1, 1], "colour": 1}))
        code, _, err = invoke(capsys, "analyze", "--channel", str(path), "--strategy", "M1")
        assert code == 1 and "colour" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "analyze", "--channel", str(tmp_path / "nope.json"), "--strategy", "M1")
        assert code == 1 and "nope.json" in err

    def test_bad_strategy(self, capsys, ch_file):
        code, _, err = invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "MAC:2,3")
        assert code == 1 and err.startswith("error: ")

    def test_power_count(self, capsys, ch_file):
        code, _, err = invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "M1", "--powers", "1,2")
        assert code == 1 and "--powers" in err

    def test_unwritable_output(self, capsys, ch_file, tmp_path):
        target = str(tmp_path / "missing" / "out.json")
        code, _, err = invoke(capsys, "analyze", "--channel", ch_file, "--strategy", "M1", "--out", target)
        assert code == 1 and "--out" in err
        code, _, err = invoke(capsys, "rho-delta", "--b", "1", "--p3", "1", "--out", target)
        assert code == 1 and "--out" in err
