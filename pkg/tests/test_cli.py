import csv
import io
import json
from fractions import Fraction

import pytest

from torusflow.cli import CSV_HEADER, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


class TestAnalyzeCommand:
    def test_builtin_vector(self, capsys):
        code, payload, _ = run_json(capsys, "analyze", "--vec", "sqrt2-sum")
        assert code == 0
        assert payload["d"] == 2
        assert payload["c_alpha"] == "3"
        assert payload["kernel_basis"] == [["1", "1", "-1"]]
        assert payload["normalized"] is None

    def test_spec_file(self, capsys, tmp_path):
        doc = {
            "name": "half",
            "constants": [{"symbol": "one", "kind": "one"}],
            "entries": [["1"], ["1/2"]],
        }
        path = tmp_path / "half.json"
        path.write_text(json.dumps(doc))
        code, payload, _ = run_json(capsys, "analyze", "--spec", str(path))
        assert code == 0
        assert payload["d"] == 1
        assert payload["lattice_basis"] == [["2", "1"]]

    def test_malformed_spec_exits_2(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "analyze", "--spec", str(path))
        assert code == 2
        assert "error" in err

    def test_missing_vector_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "--vec", "unheard-of")
        assert code == 2

    def test_determinism_modulo_wall_time(self, capsys):
        _, first, _ = run_json(capsys, "analyze", "--vec", "sqrt2")
        _, second, _ = run_json(capsys, "analyze", "--vec", "sqrt2")
        first.pop("wall_time_s")
        second.pop("wall_time_s")
        assert first == second


class TestPsiCommand:
    def test_spot_value(self, capsys):
        code, payload, _ = run_json(capsys, "psi", "--vec", "sqrt2", "--Q", "7")
        assert code == 0
        assert payload["witness"] == [-7, 5]
        assert payload["gap_coefficients"] == {"one": "-7", "sqrt2": "5"}
        lo, hi = Fraction(payload["value_interval"]["lo"]), Fraction(payload["value_interval"]["hi"])
        # 7 + 5 sqrt2 = 14.07106781186...
        assert lo <= Fraction(1_407_106_782, 10**8)
        assert hi >= Fraction(1_407_106_781, 10**8)

    def test_radius_below_minimum_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "psi", "--vec", "half", "--Q", "1")
        assert code == 2
        assert "Q_alpha" in err

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "psi", "--vec", "sqrt2", "--Q", "1", "--format", "csv"
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["witness"] == "[-1, 1]"


class TestErgodizeCommand:
    def test_bracket_with_bound(self, capsys):
        code, payload, _ = run_json(
            capsys, "ergodize", "--vec", "half", "--delta", "1/10", "--tol", "1/20"
        )
        assert code == 0
        assert Fraction(payload["t_hi"]) <= 2
        assert Fraction(payload["t_lo"]) >= Fraction(7, 4)
        assert payload["bound_holds"] is True

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "bracket.json"
        code, _, _ = run_cli(
            capsys,
            "ergodize", "--vec", "half", "--delta", "1/4", "--out", str(out),
        )
        assert code == 0
        assert json.loads(out.read_text())["delta"] == "1/4"


class TestApproxCommand:
    def test_pairs_and_certificates(self, capsys):
        code, payload, _ = run_json(capsys, "approx", "--vec", "sqrt2", "--Q", "8")
        assert code == 0
        assert payload["pairs"][0] == {"q": 2, "p": [2, 3], "omega": ["1", "3/2"]}
        assert payload["certificates"]["ok"] is True

    def test_below_threshold_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "approx", "--vec", "sqrt2", "--Q", "3")
        assert code == 2


class TestCircleCommand:
    def test_golden(self, capsys):
        code, payload, _ = run_json(
            capsys, "circle", "--alpha", "golden", "--delta", "1/4"
        )
        assert code == 0
        assert payload["N"] == 2
        assert payload["bound"] == 16
        assert payload["pass"] is True

    def test_named_vector_reduces_mod_one(self, capsys):
        code, payload, _ = run_json(
            capsys, "circle", "--alpha", "sqrt2", "--delta", "1/4"
        )
        assert code == 0
        assert payload["N"] == 2
        assert payload["bound"] == 13

    def test_rational_rotation_skips_bound(self, capsys):
        code, payload, _ = run_json(
            capsys, "circle", "--alpha", "1/3", "--delta", "1/3"
        )
        assert code == 0
        assert payload["N"] == 1
        assert payload["pass"] is None

    def test_rational_below_threshold(self, capsys):
        code, payload, _ = run_json(
            capsys, "circle", "--alpha", "1/3", "--delta", "1/4"
        )
        assert code == 0
        assert payload["defined"] is False and payload["N"] is None

    def test_failing_check_exits_1(self, capsys, monkeypatch):
        import torusflow.cli as cli
        from torusflow.circle import Theorem2Report

        def fake_check(rotation, delta):
            return Theorem2Report(delta=delta, steps=99, profile_floor=3, bound=2)

        monkeypatch.setattr(cli, "theorem2_check", fake_check)
        code, payload, _ = run_json(
            capsys, "circle", "--alpha", "golden", "--delta", "1/4"
        )
        assert code == 1
        assert payload["pass"] is False


class TestVerifyCommand:
    def test_small_sweep(self, capsys, tmp_path):
        sweep = {
            "vectors": ["sqrt2"],
            "checks": ["theorem1", "proposition", "transference", "theorem2"],
            "delta_grid": ["1", "1/2"],
            "q_grid": ["4", "8"],
            "tol": "1/10",
        }
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(sweep))
        out = tmp_path / "rows.csv"
        code, _, err = run_cli(capsys, "verify", "--sweep", str(path), "--out", str(out))
        assert code == 0
        with open(out) as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0].keys()) == CSV_HEADER
        by_check = {}
        for row in rows:
            by_check.setdefault(row["check"], []).append(row)
        assert all(r["status"] == "pass" for r in by_check["theorem1"])
        assert all(r["status"] == "pass" for r in by_check["proposition"])
        assert by_check["transference"][0]["status"] == "pass"
        # delta = 1 is outside the rotation hypothesis 0 < delta < 1
        statuses = {r["parameter"]: r["status"] for r in by_check["theorem2"]}
        assert statuses == {"1": "skip", "1/2": "pass"}
        assert "passed" in err

    def test_rational_rotation_rows_skip(self, capsys, tmp_path):
        sweep = {"vectors": ["half"], "checks": ["theorem2"], "delta_grid": ["1/2"]}
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(sweep))
        code, out, _ = run_cli(capsys, "verify", "--sweep", str(path))
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["status"] == "skip"
        assert "irrational" in rows[0]["detail"]

    def test_failing_row_exits_1(self, capsys, tmp_path, monkeypatch):
        import torusflow.cli as cli

        def fake_rows(data, spec, sweep):
            return [cli._row(spec.name, "theorem1", "1", "fail")]

        monkeypatch.setattr(cli, "_verify_theorem1", fake_rows)
        sweep = {"vectors": ["sqrt2"], "checks": ["theorem1"]}
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(sweep))
        code, _, err = run_cli(capsys, "verify", "--sweep", str(path))
        assert code == 1
        assert "1 failed" in err

    def test_missing_sweep_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "--sweep", "/nonexistent.json")
        assert code == 2
