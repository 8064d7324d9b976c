"""Soundness sweeps over the benchmark corpus, plus deliberately broken encodings."""

import dataclasses
from pathlib import Path

import pytest

from app.controller import TraceGenController
from app.evaluator import check_task
from app.logic import Eq, IntConst, IntOp, Not, ReachAtom, VarApp
from app.models import InputValuation, SweepBounds
from app.oracle import execute, sample_inputs
from app.parser import parse_program
from app.semantics import LabeledFormula, build_task

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"
ALL_BENCHMARKS = sorted(BENCHMARKS.glob("*.w"))


def rewrite_first(node, match, change):
    """Replace the first node (pre-order) satisfying match; returns (node, replaced)."""
    if match(node):
        return change(node), True
    if not dataclasses.is_dataclass(node):
        return node, False
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, tuple):
            items = list(value)
            for index, item in enumerate(items):
                items[index], done = rewrite_first(item, match, change)
                if done:
                    return dataclasses.replace(node, **{f.name: tuple(items)}), True
        elif dataclasses.is_dataclass(value):
            new, done = rewrite_first(value, match, change)
            if done:
                return dataclasses.replace(node, **{f.name: new}), True
    return node, False


def is_frame(node) -> bool:
    return (
        isinstance(node, Eq)
        and isinstance(node.left, VarApp)
        and isinstance(node.right, VarApp)
        and node.left.var == node.right.var
        and node.left.timepoint != node.right.timepoint
    )


def corrupt_frame(eq: Eq) -> Eq:
    return Eq(eq.left, IntOp("+", eq.right, IntConst(1)))


def flip_reach(atom: ReachAtom) -> Not:
    return Not(atom)


def mutate(task, group, label, match, change):
    mutated = []
    for item in getattr(task, group):
        if item.label == label:
            formula, done = rewrite_first(item.formula, match, change)
            assert done, f"nothing to mutate in {label}"
            item = LabeledFormula(label, formula)
        mutated.append(item)
    return dataclasses.replace(task, **{group: tuple(mutated)})


MUTATIONS = [
    *[
        ("semantics_axioms", f"semantics-l{line}", is_frame, corrupt_frame)
        for line in (5, 6, 7, 8, 9, 10, 12)
    ],
    *[
        ("reach_axioms", label, lambda n: isinstance(n, ReachAtom), flip_reach)
        for label in ("reach-l5", "reach-l7", "reach-l9", "reach-end")
    ],
]


@pytest.fixture(scope="module")
def copy_positive_traces():
    program = parse_program((BENCHMARKS / "copy_positive.w").read_text())
    inputs = sample_inputs(program, 20, seed=1, bounds=SweepBounds(max_len=4))
    inputs.append(InputValuation(arrays={"a": [1, -2, 3]}))
    return program, [execute(program, inp) for inp in inputs]


@pytest.mark.parametrize("group, label, match, change", MUTATIONS, ids=[m[1] for m in MUTATIONS])
def test_mutated_axiom_is_caught(copy_positive_traces, group, label, match, change):
    program, traces = copy_positive_traces
    report = check_task(mutate(build_task(program), group, label, match, change), traces)
    assert label in {v.label for v in report.violations}
    assert report.conjecture_failures == []


TRIANGLE_MUTATIONS = [
    *[
        ("semantics_axioms", f"semantics-l{line}", is_frame, corrupt_frame)
        for line in (4, 5, 6, 7, 8, 9, 10, 11, 13, 14)
    ],
    *[
        ("reach_axioms", label, lambda n: isinstance(n, ReachAtom), flip_reach)
        for label in ("reach-l9", "reach-l10", "reach-l13")
    ],
]


@pytest.fixture(scope="module")
def triangle_traces():
    program = parse_program((BENCHMARKS / "triangle.w").read_text())
    inputs = sample_inputs(program, 20, seed=2, bounds=SweepBounds(max_len=4))
    inputs.append(InputValuation(ints={"n": 3}, initial_arrays={"a": [0, 0, 0]}))
    return program, [execute(program, inp) for inp in inputs]


@pytest.mark.parametrize(
    "group, label, match, change", TRIANGLE_MUTATIONS, ids=[m[1] for m in TRIANGLE_MUTATIONS]
)
def test_mutated_nested_loop_axiom_is_caught(triangle_traces, group, label, match, change):
    program, traces = triangle_traces
    report = check_task(mutate(build_task(program), group, label, match, change), traces)
    assert label in {v.label for v in report.violations}


@pytest.mark.slow
@pytest.mark.parametrize("path", ALL_BENCHMARKS, ids=lambda p: p.stem)
def test_benchmark_sweep(path):
    controller = TraceGenController()
    report = controller.check_program(controller.load(path), path.stem, count=50, seed=0)
    assert report.traces > 0
    assert report.generator_violations == []
    assert report.conjecture_failures == []
