from pathlib import Path

import pytest

from app.errors import UnsupportedFeature
from app.logic import NatLeq, Sort, Var
from app.models import EmissionConfig
from app.parser import parse_program
from app.semantics import build_task
from app.smtlib import SmtLibWriter, emit_smtlib

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"
ALL_BENCHMARKS = sorted(BENCHMARKS.glob("*.w"))


def emit(name: str, **cfg) -> str:
    config = EmissionConfig(**cfg)
    task = build_task(
        parse_program((BENCHMARKS / name).read_text()), include_lemmas=config.include_lemmas
    )
    return emit_smtlib(task, config)


@pytest.fixture
def copy_positive_text():
    return emit("copy_positive.w")


def test_emission_is_deterministic():
    assert emit("copy_positive.w") == emit("copy_positive.w")
    assert emit("triangle.w", nat_mode="integer") == emit("triangle.w", nat_mode="integer")


def test_declarations(copy_positive_text):
    lines = copy_positive_text.splitlines()
    for expected in [
        "(set-logic UFLIA)",
        "(declare-sort Time 0)",
        "(declare-sort Nat 0)",
        "(declare-fun suc (Nat) Nat)",
        "(declare-fun l5 () Time)",
        "(declare-fun l7 (Nat) Time)",
        "(declare-fun l_end () Time)",
        "(define-fun main_end () Time l_end)",
        "(declare-fun n7 () Nat)",
        "(declare-fun a (Int) Int)",
        "(declare-fun b (Time Int) Int)",
        "(declare-fun i (Time) Int)",
        "(declare-fun a_length () Int)",
        "(declare-fun Reach (Time) Bool)",
        "(declare-fun dense_l7_j () Bool)",
    ]:
        assert expected in lines
    assert lines[-1] == "(check-sat)"


def test_labeled_asserts(copy_positive_text):
    assert "(assert (! (=> (Reach l5) " in copy_positive_text
    for label in ["nat-pred-suc", "semantics-l9", "reach-l7", "reach-end", "lemma-l7-j-b2"]:
        assert f":named {label})" in copy_positive_text
    assert copy_positive_text.count(":named lemma-") == 12


def test_negated_conjecture(copy_positive_text):
    assert "(assert (not (forall ((k Int)) (exists ((l Int)) " in copy_positive_text
    assert "(b l_end k)" in copy_positive_text


def test_assert_not_mode():
    text = emit("skip.w", conjecture_mode="assert-not")
    assert "(assert-not (= (x l_end) 3))" in text.splitlines()


def test_reach_axiom_text(copy_positive_text):
    expected = "(forall ((it7 Nat)) (= (Reach (l7 it7)) (leq it7 n7)))"
    assert f"(assert (! {expected} :named reach-l7))" in copy_positive_text


def test_integer_nat_mode():
    text = emit("copy_positive.w", nat_mode="integer")
    assert "(define-sort Nat () Int)" in text
    assert "(declare-sort Nat 0)" not in text
    assert "(declare-fun n7 () Int)" in text
    assert "(assert (! (>= n7 0) :named nat-n7))" in text
    assert "(forall ((it7 Int)) (=> (>= it7 0) (= (Reach (l7 it7)) (<= it7 n7))))" in text


def test_integer_mode_guards_nested_last_iterations():
    text = emit("triangle.w", nat_mode="integer")
    assert "(assert (! (forall ((it0 Int)) (=> (>= it0 0) (>= (n9 it0) 0))) :named nat-n9))" in text


def test_without_lemmas():
    text = emit("copy_positive.w", include_lemmas=False)
    assert "lemma-" not in text
    assert "dense_" not in text


def test_nonlinear_logic():
    source = "func main() {\n const Int n;\n Int x;\n x = n * n;\n}\nassert (>= (x main_end) 0)\n"
    text = emit_smtlib(build_task(parse_program(source)), EmissionConfig())
    assert "(set-logic UFNIA)" in text


def test_free_variables_are_rejected():
    writer = SmtLibWriter(EmissionConfig())
    with pytest.raises(UnsupportedFeature, match="free variables"):
        writer.closed(NatLeq(Var("x", Sort.NAT), Var("y", Sort.NAT)), "open-formula")


@pytest.mark.parametrize("nat_mode", ["algebraic", "integer"])
@pytest.mark.parametrize("path", ALL_BENCHMARKS, ids=lambda p: p.stem)
def test_output_parses_as_smtlib(path, nat_mode):
    """An independent SMT-LIB parser accepts every emitted file."""
    z3 = pytest.importorskip("z3")
    text = emit(path.name, nat_mode=nat_mode)
    script = text.replace("(check-sat)\n", "")
    assertions = z3.parse_smt2_string(script)
    assert len(assertions) == text.count("(assert ")


def test_header_comments_precede_logic(copy_positive_text):
    lines = copy_positive_text.splitlines()
    assert lines[:3] == [
        "; trace-logic verification task",
        "; nat mode: algebraic",
        "(set-logic UFLIA)",
    ]
