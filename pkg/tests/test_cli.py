import csv
import io
import json
import subprocess
import sys

import pytest

from singlequery.cli import main, parse_distribution, to_csv, UsageError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return json.loads(text)["records"]


FIELDS = ["algorithm", "params", "predicted", "observed", "transcripts_summary", "cost_report"]


def test_coin_weigh_exhaustive(capsys):
    code, out, _ = run(["coin-weigh", "--n", "6", "--exhaustive"], capsys)
    assert code == 0
    (rec,) = records(out)
    assert list(rec) == FIELDS
    q = rec["transcripts_summary"]["quantum"]
    assert q["runs"] == 64 and q["successes"] == 64 and q["max_oracle_calls"] == 1
    assert rec["transcripts_summary"]["classical"]["mean_oracle_calls"] == 6


def test_walsh_search_sweep(capsys):
    code, out, _ = run(["walsh-search", "--n", "2", "8", "32", "--exhaustive"], capsys)
    assert code == 0
    recs = records(out)
    assert [r["params"]["n"] for r in recs] == [2, 8, 32]
    for r in recs:
        assert r["observed"]["success_rate"] == 1.0
        assert r["observed"]["max_pairwise_overlap"] < 1e-12
        assert r["observed"]["classical_oracle_calls"] == r["predicted"]["classical_oracle_calls"]


def test_huffman_search_exhaustive_and_sampled(capsys, tmp_path):
    code, out, _ = run(["huffman-search", "--dist", "0.5 0.25 0.25", "--exhaustive"], capsys)
    assert code == 0
    recs = records(out)
    assert [r["params"]["m"] for r in recs] == [1, 2]
    assert recs[0]["observed"]["failure_rate"] == pytest.approx(0.5)
    assert recs[1]["observed"]["failure_rate"] == 0
    path = tmp_path / "p.txt"
    path.write_text("0.4 0.3\n0.2 0.1\n")
    code, out, _ = run(["huffman-search", "--dist", str(path), "--m", "2", "--trials", "5000", "--seed", "3"], capsys)
    assert code == 0
    (rec,) = records(out)
    assert rec["observed"]["failure_within_3_sigma"]
    assert rec["observed"]["classical_within_3_sigma"]
    assert rec["transcripts_summary"]["quantum"]["runs"] == 5000


def test_random_code_example(capsys):
    argv = ["random-code", "--A", "3", "--n", "6", "--k", "9", "--l", "2", "--trials", "10000", "--seed", "1"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    (rec,) = records(out)
    assert rec["params"]["m"] == 4
    assert rec["predicted"]["p_col"] == pytest.approx(1 - (80 / 81) ** 8)
    # the reported 3-sigma test is against the collision law for independent generators
    assert rec["observed"]["failure_within_3_sigma"]
    assert rec["transcripts_summary"]["quantum"]["max_oracle_calls"] == 1
    assert rec["transcripts_summary"]["classical"]["mean_oracle_calls"] == 4


def test_bounds_example(capsys):
    code, out, _ = run(["bounds", "--n", "15"], capsys)
    assert code == 0
    (rec,) = records(out)
    assert rec["predicted"]["coin_bound"] == 3.75
    assert rec["predicted"]["predetermined_limit"] == pytest.approx(7.6787, abs=1e-4)


def test_cost_reports_crossover(capsys):
    code, out, _ = run(["cost", "--n", "8", "1024", "--m", "3", "--t-preset", "quadratic", "--cost-mode", "parallel-xor"], capsys)
    assert code == 0
    recs = records(out)
    coin = [r for r in recs if r["algorithm"] == "coin_weighing"]
    assert coin[0]["predicted"]["crossover_n"] == 3
    assert {r["algorithm"] for r in recs} == {"coin_weighing", "walsh_search", "huffman_search", "random_coding"}
    assert all(r["cost_report"]["mode"] == "parallel_xor" for r in recs)


def test_csv_output_is_flat(capsys):
    code, out, _ = run(["walsh-search", "--n", "4", "--exhaustive", "--output", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["algorithm"] == "walsh_search"
    assert rows[0]["transcripts_summary.quantum.runs"] == "4"
    assert rows[0]["cost_report.quantum_time"] == "12.0"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    assert main(["bounds", "--n", "4", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert records(target.read_text())[0]["predicted"]["predetermined_limit"] == 4.0


@pytest.mark.parametrize(
    "argv",
    [
        ["coin-weigh", "--n", "4"],
        ["coin-weigh", "--n", "4", "--trials", "3"],
        ["walsh-search", "--n", "6", "--exhaustive"],
        ["huffman-search", "--dist", "0.5 0.4", "--exhaustive"],
        ["huffman-search", "--dist", "0.5 0.25 0.25", "--m", "3", "--exhaustive"],
        ["random-code", "--A", "4", "--n", "6", "--k", "4", "--l", "0", "--trials", "2", "--seed", "1"],
        ["random-code", "--A", "3", "--n", "3", "--k", "9", "--l", "2", "--trials", "2", "--seed", "1"],
        ["bounds"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["coin-weigh", "--n", "x"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["coin-weigh", "--n", "21", "--trials", "1", "--seed", "0"],
        ["coin-weigh", "--n", "18", "--exhaustive"],
        ["random-code", "--A", "2", "--n", "30", "--k", "4", "--l", "20", "--trials", "1", "--seed", "0"],
    ],
)
def test_resource_caps_exit_3(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 3
    assert "resource cap" in err


def test_invariant_violation_exit_4(monkeypatch, capsys):
    import singlequery.cli as cli

    def broken(transcripts, deterministic):
        raise cli.InvariantViolation("forced")

    monkeypatch.setattr(cli, "_check_quantum", broken)
    code, _, err = run(["coin-weigh", "--n", "2", "--exhaustive"], capsys)
    assert code == 4 and "invariant" in err


def test_parse_distribution():
    assert parse_distribution("0.5,0.5").probabilities == (0.5, 0.5)
    renormalized = parse_distribution("0.3333333 0.3333333 0.3333334")
    assert sum(renormalized.probabilities) == pytest.approx(1, abs=1e-15)
    with pytest.raises(UsageError):
        parse_distribution("0.5 0.6")
    with pytest.raises(UsageError):
        parse_distribution("1.0")
    with pytest.raises(UsageError):
        parse_distribution("0.5 abc")


def test_to_csv_handles_nested_and_missing():
    text = to_csv([{"a": {"b": 1}, "c": None}, {"a": {"b": 2, "d": [1, 2]}, "c": 3}])
    lines = text.splitlines()
    assert lines[0] == "a.b,c,a.d"
    assert lines[2] == '2,3,"[1, 2]"'


def test_module_entry_point_repeats_byte_for_byte():
    argv = [sys.executable, "-m", "singlequery", "random-code", "--A", "2", "--n", "8",
            "--k", "8", "--l", "1", "--trials", "50", "--seed", "4", "--output", "csv"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first
