import shutil
from pathlib import Path

import pytest

from app.errors import ProverError, SpawnError
from app.models import EmissionConfig
from app.parser import parse_program
from app.prover import build_command, parse_verdict, run_prover
from app.semantics import build_task
from app.smtlib import emit_smtlib

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"


@pytest.mark.parametrize(
    "output, expected",
    [
        ("unsat\n", "Proven"),
        ("% Refutation found. Thanks to Tanya!\n", "Proven"),
        ("% SZS status Unsatisfiable for task\n", "Proven"),
        ("sat\n", "Unknown"),
        ("unknown\n", "Unknown"),
        ("% SZS status GaveUp for task\n", "Unknown"),
        ("timeout\n", "Timeout"),
        ("% Time limit reached!\n", "Timeout"),
        ("(error \"line 3: unknown constant\")\n", None),
        ("", None),
    ],
)
def test_parse_verdict(output, expected):
    assert parse_verdict(output) == expected


def test_unsat_inside_a_word_is_not_a_proof():
    assert parse_verdict("model is unsatisfying\n") is None


def test_build_command_placeholder():
    assert build_command("z3 -T:5 {file}", "/tmp/a b.smt2") == ["z3", "-T:5", "/tmp/a b.smt2"]
    command = build_command("cvc5 --lang smt2", "/tmp/x.smt2")
    assert command == ["cvc5", "--lang", "smt2", "/tmp/x.smt2"]


def test_task_file_is_passed_to_prover():
    verdict = run_prover("(check-sat)\n", "cat {file}")
    assert verdict.status == "Unknown"
    assert verdict.raw_output == "(check-sat)\n"


def test_proven_verdict():
    verdict = run_prover("(check-sat)\n", "sh -c 'echo unsat' {file}")
    assert verdict.status == "Proven"
    assert verdict.wall_time >= 0


def test_missing_executable():
    with pytest.raises(SpawnError, match="no-such-prover"):
        run_prover("(check-sat)\n", "no-such-prover-xyz {file}")


def test_failing_prover_without_verdict():
    with pytest.raises(ProverError):
        run_prover("(check-sat)\n", "false")


def test_timeout_reports_full_budget():
    verdict = run_prover(
        "(check-sat)\n", "sh -c 'exec sleep 5' {file}", EmissionConfig(timeout_seconds=1)
    )
    assert verdict.status == "Timeout"
    assert verdict.wall_time >= 1


@pytest.mark.skipif(shutil.which("z3") is None, reason="z3 executable not installed")
def test_z3_proves_skip_program():
    task = build_task(parse_program((BENCHMARKS / "skip.w").read_text()))
    verdict = run_prover(emit_smtlib(task, EmissionConfig()), "z3 -T:30 {file}")
    assert verdict.status == "Proven"
