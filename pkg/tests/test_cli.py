import csv
import json

import pytest

from oracles import bisect_final_size
from pgl.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


class TestSolve:
    def test_eta_one(self, capsys):
        code, out, _ = run(capsys, "solve", "--r0", "2", "--eta", "1", "--c", "1", "--x", "0.5")
        assert code == 0
        doc = json.loads(out)
        assert doc["data"]["r_inf"] == 0.5
        assert doc["meta"]["command"] == "solve"

    def test_oracle(self, capsys):
        code, out, _ = run(capsys, "solve", "--r0", "2", "--eta", "0.01", "--c", "1", "--x", "1")
        assert code == 0
        assert json.loads(out)["data"]["r_inf"] == pytest.approx(bisect_final_size(1, 2, 0.01), abs=1e-12)

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "solve", "--r0", "2", "--eta", "0.01", "--c", "1", "--x", "1",
                           "--format", "csv")
        (row,) = parse_csv(out)
        assert set(row) == {"x", "r_inf", "p", "r_prime", "r_double_prime", "residual"}
        assert float(row["r_inf"]) == pytest.approx(0.8002039676767991, abs=1e-12)

    @pytest.mark.parametrize("argv", [
        ["solve", "--r0", "2", "--eta", "1.5", "--c", "1", "--x", "0.5"],
        ["solve", "--r0", "2", "--eta", "0.1", "--c", "1"],
        ["solve", "--r0", "2", "--eta", "0.1", "--c", "1", "--x", "-1"],
        ["solve", "--r0", "two", "--eta", "0.1", "--c", "1", "--x", "0.5"],
        ["bogus"],
        ["ess", "--r0", "2", "--eta", "0.1", "--c", "1", "--n-max", "0"],
    ])
    def test_bad_input(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert err.startswith("pgl:")

    def test_round_trip(self, capsys):
        from pgl import final_size, GameParams

        _, out, _ = run(capsys, "solve", "--r0", "3", "--eta", "0.2", "--c", "1", "--x", "0.4")
        data = json.loads(out)["data"]
        sol = final_size(0.4, GameParams(3, 0.2, 1))
        assert data == {k: getattr(sol, k) for k in data}


class TestEss:
    def test_selfish(self, capsys):
        code, out, _ = run(capsys, "ess", "--type", "selfish", "--r0", "2", "--eta", "0.01", "--c", "0.05")
        doc = json.loads(out)
        assert code == 0
        assert [r["n"] for r in doc["data"]["records"]] == [1, 2]
        assert doc["data"]["summary"]["m_g"] == 2

    def test_altruistic_excludes_single_location(self, capsys):
        code, out, _ = run(capsys, "ess", "--type", "altruistic", "--n-max", "500",
                           "--r0", "2", "--eta", "0.01", "--c", "0.05", "--format", "csv")
        rows = parse_csv(out)
        assert code == 0
        assert "1" not in {r["n"] for r in rows}
        assert "# threshold_n=4" in out

    def test_no_disease_gradient_single_row(self, capsys):
        _, out, _ = run(capsys, "ess", "--type", "selfish", "--eta", "1", "--c", "1", "--r0", "2")
        doc = json.loads(out)
        assert [r["n"] for r in doc["data"]["records"]] == [1]
        assert doc["data"]["summary"]["x_bar"] is None


class TestPoa:
    def test_selfish(self, capsys):
        code, out, _ = run(capsys, "poa", "--type", "selfish", "--r0", "2", "--eta", "0.01", "--c", "0.05")
        data = json.loads(out)["data"]
        assert code == 0 and data["bound_satisfied"] and data["certified"]

    def test_altruistic(self, capsys):
        code, out, _ = run(capsys, "poa", "--type", "altruistic", "--k", "100,200,400",
                           "--r0", "2", "--eta", "0.01", "--c", "0.05")
        entries = json.loads(out)["data"]["entries"]
        assert code == 0
        assert all(e["ratio"] >= e["floor"] for e in entries)

    def test_partial_result(self, capsys):
        code, out, _ = run(capsys, "poa", "--type", "altruistic", "--k", "1",
                           "--r0", "2", "--eta", "0.01", "--c", "0.05", "--format", "csv")
        (row,) = parse_csv(out)
        assert code == 0
        assert row["ratio"] == "" and row["error"].startswith("not an altruistic ESS")

    def test_certificate_failure_exit_code(self, capsys):
        # the single-location ESS breaks max(2, c r0 + 1) when r0 < 1 and c is large
        code, _, err = run(capsys, "poa", "--type", "selfish", "--r0", "0.5", "--eta", "0.01", "--c", "5")
        assert code == 4 and "certificate" in err

    def test_missing_k(self, capsys):
        code, _, _ = run(capsys, "poa", "--type", "altruistic", "--r0", "2", "--eta", "0.01", "--c", "0.05")
        assert code == 2


class TestCurve:
    def test_single_series(self, capsys, tmp_path):
        out = tmp_path / "fig.csv"
        code, _, _ = run(capsys, "curve", "--r0", "2", "--eta", "0.3", "--c", "0.05",
                         "--format", "csv", "--out", str(out), "--grid", "50")
        assert code == 0
        rows = parse_csv(out.read_text())
        assert len(rows) == 50
        for r in rows:
            assert float(r["selfish_total"]) == pytest.approx(
                float(r["isolation"]) + float(r["infection"]), abs=1e-12)
        markers = parse_csv((tmp_path / "fig.csv.markers").read_text())
        _, ess_out, _ = run(capsys, "ess", "--type", "selfish", "--r0", "2", "--eta", "0.3", "--c", "0.05")
        selfish = {float(m["density"]) for m in markers if m["type"] == "selfish"}
        assert selfish == {r["density"] for r in json.loads(ess_out)["data"]["records"]}

    def test_default_quartet_json(self, capsys, tmp_path):
        out = tmp_path / "fig.json"
        code, _, _ = run(capsys, "curve", "--out", str(out), "--grid", "20", "--n-max", "100")
        assert code == 0
        files = sorted(p.name for p in tmp_path.iterdir())
        assert files == [f"fig-{i}.json" for i in range(4)]
        doc = json.loads((tmp_path / "fig-2.json").read_text())
        assert "default" in doc["meta"]["parameter_source"]
        assert {"samples", "markers"} <= set(doc["data"])

    def test_unwritable(self, capsys, tmp_path):
        code, _, _ = run(capsys, "curve", "--r0", "2", "--eta", "0.3", "--c", "0.05",
                         "--out", str(tmp_path / "missing" / "fig.csv"))
        assert code == 5

    def test_needs_out(self, capsys):
        code, _, _ = run(capsys, "curve", "--r0", "2", "--eta", "0.3", "--c", "0.05")
        assert code == 2


class TestVerify:
    def test_single_point_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--r0", "2", "--eta", "0.1", "--c", "0.1", "--grid", "20")
        doc = json.loads(out)
        assert code == 0
        assert doc["meta"]["failed"] == 0
        assert all(c["passed"] for c in doc["data"]["checks"])

    def test_failing_tuple_reported(self, capsys):
        code, out, err = run(capsys, "verify", "--r0", "0.5", "--eta", "0.5", "--c", "5",
                             "--grid", "20", "--format", "csv")
        assert code == 4
        assert "selfish_poa_bound at (r0=0.5, eta=0.5, c=5.0)" in err
        failed = [r["check"] for r in parse_csv(out) if r["passed"] == "False"]
        assert failed == ["selfish_ess_cost_bound", "selfish_poa_bound"]

    def test_thread_count_does_not_change_output(self, capsys, monkeypatch, tmp_path):
        argv = ["verify", "--r0", "2", "--eta", "0.1", "--grid", "10"]
        monkeypatch.setenv("PGL_THREADS", "1")
        _, one, _ = run(capsys, *argv)
        monkeypatch.setenv("PGL_THREADS", "8")
        _, many, _ = run(capsys, *argv)
        assert one == many

    def test_bad_thread_env(self, capsys, monkeypatch):
        monkeypatch.setenv("PGL_THREADS", "zero")
        code, _, _ = run(capsys, "verify", "--r0", "2", "--eta", "0.1", "--c", "0.1")
        assert code == 2
