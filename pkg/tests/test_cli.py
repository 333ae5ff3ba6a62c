import json
import subprocess
import sys

import pytest

from qpseudo import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_classify_91_9(capsys):
    code, out, _ = run(capsys, "classify", "91", "--base", "9")
    assert code == 0
    (rec,) = records(out)
    assert list(rec) == ["n", "base", "kind", "flags", "extra"]
    assert rec["n"] == "91" and rec["base"] == "9"
    flags = rec["flags"]
    assert flags["midy_number"] and flags["strong_psp"] and flags["fermat_psp"]
    assert flags["q_probable_prime(2)"] and flags["q_probable_prime(3)"]
    assert rec["extra"]["witness_i(3)"] == "0"
    assert rec["extra"]["factorization"] == "7*13"


def test_classify_91_53(capsys):
    _, out, _ = run(capsys, "classify", "91", "--base", "53", "--q", "2")
    flags = records(out)[0]["flags"]
    assert flags["strong_psp"] and not flags["midy_number"]
    assert "q_probable_prime(3)" not in flags


def test_classify_table(capsys):
    code, out, _ = run(capsys, "classify", "2047", "--base", "2", "--format", "table")
    assert code == 0 and out.startswith("2047  2  classification") and "midy_number" in out


def test_midy_set(capsys):
    _, out, _ = run(capsys, "midy-set", "13", "--base", "10", "--format", "table")
    assert out.strip() == "2 3 6"
    _, out, _ = run(capsys, "midy-set", "49", "--base", "10")
    assert records(out)[0]["extra"]["members"] == "2 3 6 14 21 42"


@pytest.mark.parametrize(
    "argv, formula",
    [
        (["91", "--kind", "pp"], "36"),
        (["91", "--kind", "spp"], "18"),
        (["91", "--kind", "qpp", "--q", "3"], "20"),
        (["91", "--kind", "midy"], "10"),
        (["15", "--kind", "midy"], "2"),
    ],
)
def test_count_bases_verify(capsys, argv, formula):
    code, out, _ = run(capsys, "count-bases", *argv, "--verify")
    rec = records(out)[0]
    assert code == 0 and rec["base"] is None
    assert rec["extra"]["formula"] == formula and rec["extra"]["verdict"] == "MATCH"


def test_count_bases_mismatch_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "count_pp_bases", lambda n: 0)
    code, out, _ = run(capsys, "count-bases", "91", "--kind", "pp", "--verify")
    assert code == 4 and records(out)[0]["extra"]["verdict"] == "MISMATCH"


def test_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "count-bases", "13", "--kind", "midy")
    assert code == 2 and err.startswith("error:")
    assert run(capsys, "classify", "91", "--base", "7")[0] == 2
    assert run(capsys, "count-bases", "91", "--kind", "qpp")[0] == 2


def test_budget_exit_code(capsys, monkeypatch):
    # the flag writes MIDY_FACTOR_BUDGET; setting it here restores it afterwards
    monkeypatch.setenv("MIDY_FACTOR_BUDGET", "10000000")
    n = str(4611686018427388039 * 4611686018427387847)
    code, _, err = run(capsys, "classify", n, "--base", "2", "--factor-budget", "10")
    assert code == 3 and "within 10 iterations" in err


def test_io_exit_code(capsys, tmp_path):
    code, _, _ = run(
        capsys, "census", "--range", "3..100", "--base", "2", "--kind", "strong_psp", "--out", str(tmp_path / "no" / "x")
    )
    assert code == 5


def test_bad_argument_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["classify", "-5", "--base", "2"])
    assert exc.value.code == 2


def test_generate_order_and_inline_errors(capsys):
    code, out, _ = run(capsys, "generate", "--range", "2..4", "--base", "2..3")
    recs = records(out)
    assert code == 0
    assert [(r["n"], r["base"]) for r in recs] == [(n, b) for n in "234" for b in "23"]
    assert recs[0]["kind"] == recs[1]["kind"] == "error"
    assert recs[4]["extra"] == {"value": "5", "verdict": "Prime"}


def test_generate_known_values(capsys):
    _, out, _ = run(capsys, "generate", "--range", "11", "--base", "2")
    rec = records(out)[0]
    assert rec["extra"]["value"] == "2047" and rec["flags"]["midy_number"]


def test_census_cli(capsys, tmp_path):
    out_path = tmp_path / "c.jsonl"
    code, _, _ = run(
        capsys, "census", "--range", "3..10000", "--base", "2", "--kind", "overpseudoprime",
        "--jobs", "1", "--out", str(out_path), "--checkpoint", str(tmp_path / "c.ck"),
    )
    assert code == 0
    assert [json.loads(x)["n"] for x in out_path.read_text().splitlines()] == ["2047", "3277", "4033", "8321"]


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "qpseudo", "midy-set", "13", "--base", "10", "--format", "table"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.strip() == "2 3 6"
