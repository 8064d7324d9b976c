from pathlib import Path

import pytest

from app.lemmas import instantiate_all, lemma_a1, lemma_b2, lemma_dense
from app.logic import (
    Eq,
    Forall,
    Iff,
    Implies,
    LocationApp,
    Not,
    PredApp,
    ReachAtom,
    VarApp,
    iter_subformulas,
    iter_subterms,
)
from app.parser import parse_program
from app.program_model import ProgramModel

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"


@pytest.fixture
def model():
    return ProgramModel(parse_program((BENCHMARKS / "copy_positive.w").read_text()))


def test_copy_positive_has_twelve_instances(model):
    instances = instantiate_all(model.program, model)
    labels = [li.label for li in instances]
    assert len(instances) == 12
    assert labels[:2] == ["lemma-l7-b-a1-eq", "lemma-l7-b-a1-leq"]
    assert "lemma-l7-j-b1" in labels
    assert "lemma-l7-i-dense" in labels
    assert len(set(labels)) == 12


def test_two_loops_one_variable():
    source = """func main() {
  Int x = 0;
  while (x < 3) {
    x = x + 1;
  }
  while (x < 6) {
    x = x + 1;
  }
}
"""
    p = parse_program(source)
    instances = instantiate_all(p)
    assert len(instances) == 10
    assert {li.loop for li in instances} == {3, 6}


def test_no_instance_mentions_reach(model):
    for li in instantiate_all(model.program, model):
        assert not any(isinstance(f, ReachAtom) for f in iter_subformulas(li.formula))


def test_dense_definition(model):
    loop = model.statement(7)
    instance = lemma_dense(model, loop, model.program.decl("j"))
    assert isinstance(instance.formula, Iff)
    assert instance.formula.left == PredApp("dense_l7_j")


def test_array_a1_quantifies_position_outermost(model):
    loop = model.statement(7)
    instance = lemma_a1(model, loop, model.program.decl("b"), "eq")
    formula = instance.formula
    assert isinstance(formula, Forall)
    (pos,) = formula.binders
    assert pos.name == "pos"
    body = formula.body
    assert isinstance(body, Forall) and [b.name for b in body.binders] == ["bl", "br"]
    conclusion = body.body.right.right
    bl, br = body.binders
    assert conclusion == Eq(
        VarApp("b", LocationApp("l7", (bl,)), pos), VarApp("b", LocationApp("l7", (br,)), pos)
    )


def test_b2_uses_dense_and_disequality(model):
    instance = lemma_b2(model, model.statement(7), model.program.decl("j"))
    implication = instance.formula.body
    assert isinstance(implication, Implies)
    assert implication.left.args[0] == PredApp("dense_l7_j")
    assert isinstance(implication.right, Not)


def test_nested_loop_instances_quantify_enclosing_iteration():
    source = """func main() {
  Int i = 0;
  Int j = 0;
  while (i < 3) {
    j = 0;
    while (j < i) {
      j = j + 1;
    }
    i = i + 1;
  }
}
"""
    model = ProgramModel(parse_program(source))
    inner = model.statement(6)
    instance = lemma_dense(model, inner, model.program.decl("j"))
    assert isinstance(instance.formula, Forall)
    assert [b.name for b in instance.formula.binders] == ["it4"]
    assert instance.formula.body.left == PredApp("dense_l6_j", tuple(instance.formula.binders))
    symbols = {
        t.symbol
        for f in iter_subformulas(instance.formula)
        if isinstance(f, Eq)
        for side in (f.left, f.right)
        for t in iter_subterms(side)
        if isinstance(t, LocationApp)
    }
    assert symbols == {"l6"}
