import json

import pytest

from oracles import factor_trial, is_prime_trial, miller_brute, order_brute, valuation
from qpseudo.census import CHECKPOINT_KEYS, Checkpoint, CensusRecord, read_records, run_census
from qpseudo.errors import DomainError

A141232_HEAD = [2047, 3277, 4033, 8321, 65281, 80581, 85489, 88357]


def _overpseudoprimes_brute(lo, hi, b):
    out = []
    for n in range(max(lo, 3) | 1, hi + 1, 2):
        if n % b == 0 or pow(b, n - 1, n) != 1 or is_prime_trial(n):
            continue
        order = order_brute(b, n)
        if all(order_brute(b, p) == order for p in factor_trial(n)):
            out.append(n)
    return out


def test_overpseudoprime_census_small(tmp_path):
    out = tmp_path / "o.jsonl"
    res = run_census(3, 20000, 2, "overpseudoprime", str(out), chunk_size=500)
    assert res.complete and res.cursor == 20001
    ns = [r.n for r in read_records(str(out))]
    assert ns == _overpseudoprimes_brute(3, 20000, 2) == A141232_HEAD[:4]


def test_strong_and_fermat_census_match_brute(tmp_path):
    out = tmp_path / "s.jsonl"
    run_census(3, 30000, 3, "strong_psp", str(out), chunk_size=777)
    expected = [n for n in range(5, 30001, 2) if n % 3 and not is_prime_trial(n) and miller_brute(n, 3)]
    assert [r.n for r in read_records(str(out))] == expected
    run_census(3, 10000, 2, "fermat_psp", str(out))
    expected = [n for n in range(3, 10001, 2) if not is_prime_trial(n) and pow(2, n - 1, n) == 1]
    recs = read_records(str(out))
    assert [r.n for r in recs] == expected
    assert all(r.kind == "fermat_psp" and r.flags["fermat_psp"] for r in recs)


def test_q_psp_census(tmp_path):
    out = tmp_path / "q.jsonl"
    run_census(3, 3000, 2, "q_psp", str(out), q=3)
    recs = read_records(str(out))
    assert recs and all(r.kind == "q_psp(3)" and (r.n - 1) % 3 == 0 for r in recs)
    expected = []
    for n in range(7, 3001, 6):
        ps = factor_trial(n)
        if is_prime_trial(n) or any((p - 1) % 3 for p in ps) or pow(2, n - 1, n) != 1:
            continue
        if len({valuation(3, order_brute(2, p)) for p in ps}) == 1:
            expected.append(n)
    assert [r.n for r in recs] == expected


def test_record_shape(tmp_path):
    out = tmp_path / "o.jsonl"
    run_census(2000, 2100, 2, "overpseudoprime", str(out))
    line = out.read_text().splitlines()[0]
    obj = json.loads(line)
    assert list(obj) == ["n", "base", "kind", "flags", "extra"]
    assert obj["n"] == "2047" and obj["base"] == "2" and obj["kind"] == "overpseudoprime"
    assert obj["flags"]["midy_number"] is True and obj["extra"]["order"] == "11"
    assert CensusRecord.from_json(line).to_json() == line


def test_empty_range(tmp_path):
    out = tmp_path / "e.jsonl"
    ck = tmp_path / "e.ck"
    res = run_census(100, 50, 2, "overpseudoprime", str(out), checkpoint_path=str(ck))
    assert out.read_text() == "" and res.hits == 0 and res.complete


def test_checkpoint_schema(tmp_path):
    out, ck = tmp_path / "o.jsonl", tmp_path / "o.ck"
    run_census(3, 10000, 2, "overpseudoprime", str(out), checkpoint_path=str(ck), chunk_size=1000)
    obj = json.loads(ck.read_text())
    assert tuple(obj) == CHECKPOINT_KEYS
    assert obj == {
        "range_lo": "3",
        "range_hi": "10000",
        "cursor": "10001",
        "base": "2",
        "kind": "overpseudoprime",
        "hits_so_far": "4",
    }
    assert Checkpoint.from_json(ck.read_text()).to_json() == ck.read_text().strip()


@pytest.mark.parametrize("jobs", [1, 4, 8])
def test_jobs_byte_identical(tmp_path, jobs):
    ref = tmp_path / "ref.jsonl"
    run_census(3, 100000, 2, "strong_psp", str(ref), jobs=1, chunk_size=2048)
    out = tmp_path / f"j{jobs}.jsonl"
    run_census(3, 100000, 2, "strong_psp", str(out), jobs=jobs, chunk_size=2048)
    assert out.read_bytes() == ref.read_bytes()


def test_resume_equals_uninterrupted(tmp_path):
    ref = tmp_path / "ref.jsonl"
    run_census(3, 100000, 2, "overpseudoprime", str(ref), chunk_size=1000)
    out, ck = tmp_path / "r.jsonl", tmp_path / "r.ck"
    steps = 0
    while True:
        res = run_census(
            3, 100000, 2, "overpseudoprime", str(out), checkpoint_path=str(ck), chunk_size=1000, max_chunks=7, jobs=2
        )
        steps += 1
        if res.complete:
            break
    assert steps > 5
    assert out.read_bytes() == ref.read_bytes()


def test_resume_discards_unsaved_tail(tmp_path):
    out, ck = tmp_path / "r.jsonl", tmp_path / "r.ck"
    run_census(3, 70000, 2, "overpseudoprime", str(out), checkpoint_path=str(ck), chunk_size=1000, max_chunks=20)
    saved = out.read_bytes()
    with open(out, "a") as fh:
        fh.write('{"n": "garbage"}\n')  # written after the last checkpoint
    run_census(3, 70000, 2, "overpseudoprime", str(out), checkpoint_path=str(ck), chunk_size=1000)
    text = out.read_text()
    assert text.startswith(saved.decode()) and "garbage" not in text
    assert [r.n for r in read_records(str(out))] == A141232_HEAD[:5]


def test_foreign_checkpoint_rejected(tmp_path):
    out, ck = tmp_path / "r.jsonl", tmp_path / "r.ck"
    run_census(3, 5000, 2, "overpseudoprime", str(out), checkpoint_path=str(ck))
    with pytest.raises(DomainError):
        run_census(3, 5000, 3, "overpseudoprime", str(out), checkpoint_path=str(ck))


def test_bad_arguments(tmp_path):
    out = str(tmp_path / "x")
    with pytest.raises(DomainError):
        run_census(3, 10, 2, "lucas", out)
    with pytest.raises(DomainError):
        run_census(3, 10, 2, "q_psp", out, q=4)
