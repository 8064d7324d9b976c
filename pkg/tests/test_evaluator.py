import dataclasses
from pathlib import Path

import pytest

from app.errors import StepLimitExceeded
from app.evaluator import EvalDomains, Evaluator, check_task, eval_formula, falsifying_grounding
from app.logic import (
    Eq,
    Exists,
    Forall,
    Implies,
    IntConst,
    LastItApp,
    LocationApp,
    NatLeq,
    ReachAtom,
    Sort,
    Var,
    VarApp,
    numeral,
)
from app.models import InputValuation
from app.oracle import execute
from app.parser import parse_program
from app.program_model import END
from app.semantics import LabeledFormula, build_task

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"
IT7 = Var("it7", Sort.NAT)
INPUTS = [[], [1, -2, 3], [-1, -1], [0, 2, 2, -3, 1]]


@pytest.fixture
def program():
    return parse_program((BENCHMARKS / "copy_positive.w").read_text())


@pytest.fixture
def task(program):
    return build_task(program)


@pytest.fixture
def traces(program):
    return [execute(program, InputValuation(arrays={"a": a})) for a in INPUTS]


@pytest.fixture
def trace(traces):
    return traces[1]


def test_copy_positive_task_holds_on_traces(task, traces):
    report = check_task(task, traces, name="copy_positive")
    assert report.violations == []
    assert report.traces == len(INPUTS)
    items = len(task.axioms()) + len(task.facts) + 1
    assert report.checks == items * len(INPUTS)


def test_reachability(trace):
    assert eval_formula(ReachAtom(END), trace) is True
    assert eval_formula(ReachAtom(LocationApp("l9", (numeral(0),))), trace) is True
    assert eval_formula(ReachAtom(LocationApp("l9", (numeral(1),))), trace) is False


def test_conjecture_holds(task, trace):
    assert eval_formula(task.conjecture, trace) is True


def test_missing_witness_is_out_of_domain(trace):
    k = Var("k", Sort.INT)
    assert eval_formula(Exists((k,), Eq(k, IntConst(1000))), trace) is None


def test_falsifying_grounding(trace):
    f = Forall((IT7,), NatLeq(IT7, LastItApp("n7")))
    value, grounding = falsifying_grounding(f, trace, EvalDomains.from_trace(trace))
    assert value is False
    assert grounding == {"it7": 4}


def test_domains(trace):
    dom = EvalDomains.from_trace(trace)
    assert dom.nat_bound == 5
    assert set(range(-2, 6)) <= set(dom.int_window)
    assert dom.time_domain[-1] == ("l_end", ())


def test_dense_is_decided_on_the_trace(trace):
    evaluator = Evaluator(trace, EvalDomains.from_trace(trace))
    assert evaluator.dense("dense_l7_i", ())
    assert evaluator.dense("dense_l7_j", ())


def test_dense_detects_jumps():
    source = """func main() {
  Int x = 0;
  while (x < 6) {
    x = x + 2;
  }
}
"""
    trace = execute(parse_program(source), InputValuation())
    assert not Evaluator(trace, EvalDomains.from_trace(trace)).dense("dense_l3_x", ())


def test_false_conjecture_is_a_counterexample(task, traces):
    wrong = dataclasses.replace(task, conjecture=Eq(VarApp("j", END), IntConst(99)))
    report = check_task(wrong, traces)
    assert len(report.conjecture_failures) == len(INPUTS)
    assert report.generator_violations == []


def test_broken_axiom_is_reported(task, traces):
    start = LocationApp("l6")
    broken = LabeledFormula(
        "semantics-l6",
        Implies(ReachAtom(start), Eq(VarApp("j", LocationApp("l7", (numeral(0),))), IntConst(1))),
    )
    axioms = tuple(broken if a.label == "semantics-l6" else a for a in task.semantics_axioms)
    report = check_task(dataclasses.replace(task, semantics_axioms=axioms), traces)
    assert {v.label for v in report.violations} == {"semantics-l6"}
    assert all(v.kind == "semantics" for v in report.violations)
    assert "a=[1, -2, 3]" in report.violations[1].valuation


def test_nonterminating_runs_are_skipped():
    source = """func main() {
  Int x = 0;
  while (x >= 0) {
    x = x + 1;
  }
}
"""
    program = parse_program(source)
    with pytest.raises(StepLimitExceeded) as excinfo:
        execute(program, InputValuation(), step_limit=20)
    report = check_task(build_task(program), [excinfo.value.trace])
    assert report.nonterminating == 1
    assert report.checks == 0
