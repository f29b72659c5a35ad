import csv
import io
import json

import jsonschema
import pytest

from lensj import cli
from lensj.records import RunRecord, compute_record, load_schema
from lensj.report import CSV_COLUMNS


@pytest.fixture(autouse=True)
def fixed_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- records

@pytest.mark.parametrize("p,r,k", [(3, 1, 0), (3, 1, 4), (3, 2, 6), (5, 2, 20), (3, 3, 12), (7, 1, 40)])
def test_record_round_trip(p, r, k):
    rec = compute_record(p, r, k)
    again = RunRecord.from_json(rec.to_json())
    assert again == rec
    assert again.to_json() == rec.to_json()


def test_record_validates_against_schema():
    schema = load_schema()
    for args in [(3, 1, 4), (3, 2, 6), (5, 1, 3)]:
        jsonschema.validate(compute_record(*args).to_dict(), schema)


def test_big_orders_are_strings():
    d = compute_record(3, 1, 80).to_dict()
    assert d["j_invariants"] == [str(3 ** 40)]
    assert d["j_result"]["order_of_w"] == str(3 ** 40)


def test_timestamp_is_pinned():
    assert compute_record(3, 1, 2).timestamp == "2023-11-14T22:13:20Z"


def test_unknown_schema_version_rejected():
    d = compute_record(3, 1, 2).to_dict()
    d["schema_version"] = 2
    with pytest.raises(ValueError):
        RunRecord.from_dict(d)


# ---------------------------------------------------------------- compute

def test_compute_json(capsys):
    code, out, _ = run(capsys, "compute", "--p", "3", "--r", "1", "--k", "4", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["j_invariants"] == ["9"]
    assert d["schema_version"] == 1
    jsonschema.validate(d, load_schema())


def test_compute_trivial_text(capsys):
    code, out, _ = run(capsys, "compute", "--p", "3", "--r", "1", "--k", "1")
    assert code == 0
    assert "trivial" in out


def test_compute_rejects_bad_prime(capsys):
    code, _, err = run(capsys, "compute", "--p", "4", "--r", "1", "--k", "4")
    assert code == 2
    assert "p must be an odd prime" in err


@pytest.mark.parametrize("argv", [
    ["--p", "1009", "--r", "1", "--k", "4"],
    ["--p", "3", "--r", "9", "--k", "4"],
    ["--p", "3", "--r", "0", "--k", "4"],
    ["--p", "3", "--r", "1", "--k", "2001"],
    ["--p", "3", "--r", "1", "--k", "4", "--q", "4"],
    ["--p", "3", "--r", "1", "--k", "4", "--t", "1"],
])
def test_compute_guardrails(capsys, argv):
    code, _, err = run(capsys, "compute", *argv)
    assert code == 2 and err.startswith("error:")


def test_compute_missing_argument_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["compute", "--p", "3"])
    assert exc.value.code == 2


def test_compute_csv(capsys):
    code, out, _ = run(capsys, "compute", "--p", "3", "--r", "2", "--k", "10", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == CSV_COLUMNS
    row = dict(zip(rows[0], rows[1]))
    assert row["j_invariants"] == "3;243"
    assert row["thm8_list"] == "5;1"
    assert row["thm5"] == "6"
    assert row["checks_failed"] == "0"


def test_compute_level_and_out(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "compute", "--p", "3", "--r", "2", "--k", "6", "--t", "1",
                       "--format", "json", "--out", str(out_file))
    assert out == ""
    d = json.loads(out_file.read_text())
    assert d["level"]["thm8"] == "1" and d["level"]["quadratic"] is True
    jsonschema.validate(d, load_schema())
    # the kernel/cokernel mismatch at this point is a hard failure
    assert code == 1


def test_compute_alternative_generator(capsys):
    code, out, _ = run(capsys, "compute", "--p", "5", "--r", "1", "--k", "8", "--q", "3",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["q"] == "3"


# ---------------------------------------------------------------- verify

def test_verify_trivial_note(capsys):
    code, out, _ = run(capsys, "verify", "--p-list", "5", "--r-max", "1", "--k-max", "3")
    assert code == 0
    assert "All hard checks pass." in out
    assert "p=5: all groups trivial for k < 4." in out


def test_verify_empty_grid(capsys):
    assert run(capsys, "verify", "--p-list", "", "--r-max", "1", "--k-max", "3")[0] == 2
    assert run(capsys, "verify", "--p-list", "3", "--r-max", "0", "--k-max", "3")[0] == 2
    assert run(capsys, "verify", "--p-list", "3", "--r-max", "1", "--k-max", "0")[0] == 2


def test_verify_grid_limit(capsys):
    code, _, err = run(capsys, "verify", "--p-list", "3,5,7", "--r-max", "8", "--k-max", "500")
    assert code == 2 and "limit" in err


def test_verify_report_file(capsys, tmp_path):
    report = tmp_path / "report.md"
    code, out, _ = run(capsys, "verify", "--p-list", "3,5", "--r-max", "2", "--k-max", "8",
                       "--report", str(report))
    text = report.read_text()
    assert text == out
    assert "## Findings" in text and "| 5 | 1 | 2 | 1 | 0 | 1 | 0 |" in text
    # (3,2,6) and (3,2,7) fail the kernel/cokernel comparison
    assert code == 1
    assert "3  2  | .....FF." in text


# ---------------------------------------------------------------- scan

def scan(capsys, cache, jobs=1, k_max=10):
    return run(capsys, "scan", "--p-list", "3", "--r-max", "2", "--k-max", str(k_max),
               "--cache", str(cache), "--jobs", str(jobs))


def test_scan_counts_and_idempotence(capsys, tmp_path):
    cache = tmp_path / "c.ndjson"
    code, out, _ = scan(capsys, cache)
    assert out.startswith("20 new records")
    assert len(cache.read_text().splitlines()) == 20
    before = cache.read_bytes()
    code2, out, _ = scan(capsys, cache)
    assert out.startswith("0 new records, 20 cached")
    assert cache.read_bytes() == before
    assert code == code2 == 1


def test_scan_job_count_independent(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    scan(capsys, a, jobs=1)
    scan(capsys, b, jobs=4)
    assert sorted(a.read_text().splitlines()) == sorted(b.read_text().splitlines())
    assert a.read_bytes() == b.read_bytes()


def test_scan_corrupt_line(capsys, tmp_path):
    cache = tmp_path / "c"
    scan(capsys, cache, k_max=3)
    with open(cache, "a") as fh:
        fh.write("{not json\n")
    code, out, err = scan(capsys, cache, k_max=4)
    assert "cache line 7: corrupt record" in err
    assert out.startswith("2 new records, 6 cached")
    lines = cache.read_text().splitlines()
    assert len(lines) == 9 and lines[-1] == "{not json"
    assert code == 0


def test_scan_unwritable(capsys, tmp_path):
    code, _, err = scan(capsys, tmp_path / "missing" / "c")
    assert code == 2 and "not writable" in err
