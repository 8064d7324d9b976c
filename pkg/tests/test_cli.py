from pathlib import Path

import pytest

from app.cli import main
from app.database import Database

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"
SKIP = str(BENCHMARKS / "skip.w")
STUB_PROVER = "sh -c 'echo unsat' {file}"


def test_emit_to_file(tmp_path):
    out = tmp_path / "skip.smt2"
    assert main(["emit", SKIP, "-o", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("; trace-logic verification task\n")
    assert "\n(set-logic UFLIA)\n" in text
    assert text.endswith("(check-sat)\n")


def test_emit_to_stdout(capsys):
    assert main(["emit", SKIP, "--nat-mode", "integer"]) == 0
    assert "(define-sort Nat () Int)" in capsys.readouterr().out


def test_emit_needs_one_input(capsys):
    assert main(["emit"]) == 2
    assert "exactly one input" in capsys.readouterr().err


def test_bad_value_range():
    assert main(["check", SKIP, "--val-range", "5"]) == 2
    assert main(["check", SKIP, "--val-range", "3:-3"]) == 2


def test_unknown_mode():
    with pytest.raises(SystemExit) as excinfo:
        main(["prove", SKIP])
    assert excinfo.value.code == 2


def test_invalid_source(tmp_path, capsys):
    bad = tmp_path / "bad.w"
    bad.write_text("func main() {\n  x = 1;\n}\n")
    assert main(["emit", str(bad)]) == 2
    assert "undeclared" in capsys.readouterr().err


def test_check_clean_program(capsys):
    assert main(["check", SKIP, "--count", "3"]) == 0
    assert "0 violations / " in capsys.readouterr().out


def test_check_reports_false_assertion(tmp_path, capsys):
    wrong = tmp_path / "wrong.w"
    wrong.write_text("func main() {\n  Int x = 3;\n  skip;\n}\nassert (= (x main_end) 4)\n")
    assert main(["check", str(wrong), "--count", "2"]) == 1
    out = capsys.readouterr().out
    assert "0 violations / " in out
    assert "assertion counterexamples" in out


def test_check_dumps_traces(tmp_path):
    dump = tmp_path / "traces"
    assert main(["check", SKIP, "--count", "1", "--dump-traces", str(dump)]) == 0
    (trace_file,) = dump.iterdir()
    assert trace_file.read_text().splitlines()[0].startswith("l2 init")


def test_verify_with_missing_prover(capsys):
    assert main(["verify", SKIP, "--prover", "no-such-prover-xyz {file}"]) == 2
    assert "cannot start prover" in capsys.readouterr().err


def test_verify_with_stub_prover(capsys):
    assert main(["verify", SKIP, "--prover", STUB_PROVER]) == 0
    assert capsys.readouterr().out.startswith("Proven\t")


def test_bench_records_run(tmp_path, capsys):
    db_path = str(tmp_path / "runs.db")
    code = main(
        ["bench", str(BENCHMARKS), "--prover", STUB_PROVER, "--jobs", "2", "--db", db_path]
    )
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    total = len(list(BENCHMARKS.glob("*.w")))
    assert out[0] == "benchmark\tstatus\twall_time\taxioms\tlemmas"
    assert out[-1] == f"Total solved {total} / {total}"

    run = Database(db_path).latest_run()
    assert len(run.rows) == total
    assert run.prover == STUB_PROVER


def test_bench_continues_past_invalid_source(tmp_path, capsys):
    (tmp_path / "broken.w").write_text("func main() {\n  Int x = ;\n}\n")
    (tmp_path / "skip.w").write_text(Path(SKIP).read_text())
    db_path = str(tmp_path / "runs.db")
    assert main(["bench", str(tmp_path), "--prover", STUB_PROVER, "--db", db_path]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].startswith("broken\tInvalidSource\t")
    assert out[2].startswith("skip\tProven\t")
    assert out[-1] == "Total solved 1 / 2"

    rows = Database(db_path).latest_run().rows
    assert rows[0].status == "InvalidSource"
    assert rows[0].axioms == 0
    assert rows[0].message


def test_check_is_deterministic(capsys):
    copy_positive = str(BENCHMARKS / "copy_positive.w")
    main(["check", copy_positive, "--count", "5", "--seed", "4"])
    first = capsys.readouterr().out
    main(["check", copy_positive, "--count", "5", "--seed", "4"])
    assert capsys.readouterr().out == first
