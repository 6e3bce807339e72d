import csv
import io
import json

import pytest

from hoftrace.cli import main
from hoftrace.traces import TraceKind, trace_series
from hoftrace.core import make_flux


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_coeffs_golden(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--p", "1", "--q", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["a"] == [-1.0, 8.0, -4.0]
    assert doc["p"] == 1 and doc["q"] == 4 and doc["lambda"] == 2.0


def test_coeffs_methods_agree(capsys):
    _, out_r, _ = run_cli(capsys, "coeffs", "--q", "5", "--method", "recursive")
    _, out_n, _ = run_cli(capsys, "coeffs", "--q", "5", "--method", "nested")
    a_r = json.loads(out_r)["a"]
    a_n = json.loads(out_n)["a"]
    assert a_r == pytest.approx(a_n, rel=1e-12)


def test_trace_single(capsys):
    code, out, _ = run_cli(capsys, "trace", "--p", "1", "--q", "3", "--n", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["trace"] == 24.0
    assert doc["value"] == 24.0
    assert doc["method"] == "partition-sum"
    assert doc["kind"] == "full"


def test_trace_table_schema(capsys):
    code, out, _ = run_cli(capsys, "trace", "--q", "2", "--n-max", "6")
    assert code == 0
    records = json.loads(out)["records"]
    assert len(records) == 7
    for record in records:
        assert set(record) == {"p", "q", "lambda", "kind", "n", "s", "value", "method"}


def test_point_trace_values_and_warning(capsys):
    code, out, err = run_cli(
        capsys, "point-trace", "--p", "1", "--q", "2", "--n", "4", "--s", "0", "1", "9"
    )
    assert code == 0
    records = json.loads(out)["records"]
    assert [r["value"] for r in records[:2]] == [16.0, 17.0]
    assert "spectral range" in err


def test_series_matches_library(capsys):
    code, out, _ = run_cli(
        capsys, "series", "--p", "1", "--q", "3", "--kind", "mid-band", "--n-max", "6"
    )
    assert code == 0
    values = [r["value"] for r in json.loads(out)["records"]]
    expected = trace_series(make_flux(1, 3), 2.0, TraceKind.MID_BAND, None, 6)
    assert values == pytest.approx(expected)


def test_dos_document(capsys):
    code, out, _ = run_cli(capsys, "dos", "--q", "2", "--grid", "7")
    assert code == 0
    doc = json.loads(out)
    assert doc["lambda_tilde"] == 1.0
    assert len(doc["samples"]) == 7
    assert doc["samples"][3]["density"] is None  # s = 0 diverges
    assert [m["value"] for m in doc["moments"]] == [1.0, 4.0, 36.0, 400.0, 4900.0, 63504.0]


def test_csv_round_trip(capsys):
    code, out, _ = run_cli(
        capsys, "trace", "--q", "3", "--n-max", "8", "--format", "csv"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    for row in rows:
        n = int(row["n"])
        reparsed = float(row["value"])
        _, single_out, _ = run_cli(capsys, "trace", "--q", "3", "--n", str(n))
        assert reparsed == json.loads(single_out)["value"]
        assert row["s"] == ""


def test_coeffs_csv_round_trip(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--q", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    _, json_out, _ = run_cli(capsys, "coeffs", "--q", "5")
    expected = json.loads(json_out)["a"]
    assert [float(r["a"]) for r in rows] == expected


def test_dos_csv_round_trip(capsys):
    code, out, _ = run_cli(
        capsys, "dos", "--q", "2", "--grid", "7", "--format", "csv"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    densities = [float(r["value"]) for r in rows if r["record"] == "density"]
    assert len(densities) == 7
    assert densities[3] == float("inf")  # s = 0 divergence survives the round trip
    moments = [float(r["value"]) for r in rows if r["record"] == "moment"]
    assert moments == [1.0, 4.0, 36.0, 400.0, 4900.0, 63504.0]


def test_dos_lambda_tilde_override(capsys):
    code, out, _ = run_cli(
        capsys, "dos", "--q", "5", "--lambda-tilde", "0.5", "--grid", "3"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["lambda_tilde"] == 0.5
    assert doc["support_half_width"] == 3.0
    assert doc["moments"][1]["value"] == 2.5  # binom(2,1)*(1 + 0.25)/... = 2(1+lt^2)


def test_output_file(tmp_path, capsys):
    target = tmp_path / "coeffs.json"
    code, out, _ = run_cli(
        capsys, "coeffs", "--p", "1", "--q", "3", "--output", str(target)
    )
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["a"] == [-1.0, 6.0]


def test_invalid_flux_exits_one(capsys):
    code, _, err = run_cli(capsys, "trace", "--q", "0", "--n", "2")
    assert code == 1
    assert "denominator" in err


def test_moment_cap_exits_one(capsys):
    code, _, err = run_cli(capsys, "trace", "--q", "3", "--n", "100")
    assert code == 1
    assert "capped" in err


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["trace", "--q", "3"])  # neither --n nor --n-max
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1


def test_verify_passes(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--p", "1", "--q", "3", "--lambda", "2", "--n-max", "6"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "pass"
    names = {c["check"] for c in doc["checks"]}
    assert "trace-vs-walk" in names and "trace-sum-rule" in names
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_verify_anisotropic(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--p", "1", "--q", "2", "--lambda", "1", "--n-max", "8"
    )
    assert code == 0
    assert json.loads(out)["status"] == "pass"


def test_thread_fanout_is_deterministic(capsys, monkeypatch):
    _, serial, _ = run_cli(capsys, "trace", "--q", "5", "--n-max", "10")
    monkeypatch.setenv("HOFTRACE_THREADS", "4")
    _, threaded, _ = run_cli(capsys, "trace", "--q", "5", "--n-max", "10")
    assert serial == threaded
