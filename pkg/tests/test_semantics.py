from pathlib import Path

import pytest

from app import syntax as w
from app.errors import ScopeError
from app.logic import (
    TRUE,
    ZERO,
    And,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    IntCmp,
    IntConst,
    IntOp,
    LastItApp,
    LengthConst,
    LocationApp,
    NatLeq,
    NatSuc,
    Not,
    ReachAtom,
    Sort,
    Var,
    VarApp,
    conj,
    free_vars,
)
from app.parser import parse_program
from app.program_model import END, ContextRef, ProgramModel
from app.semantics import (
    SemanticsBuilder,
    build_task,
    embed_property,
    embed_triple,
    eval_expr_at,
)

BENCHMARKS = Path(__file__).parent.parent / "benchmarks"
IT7 = Var("it7", Sort.NAT)


def l(line, *args):
    return LocationApp(f"l{line}", tuple(args))


@pytest.fixture
def program():
    return parse_program((BENCHMARKS / "copy_positive.w").read_text())


@pytest.fixture
def builder(program):
    return SemanticsBuilder(ProgramModel(program))


@pytest.fixture
def task(program):
    return build_task(program)


def by_label(items):
    return {item.label: item.formula for item in items}


def test_task_shape(task):
    assert [a.label for a in task.semantics_axioms] == [
        "semantics-l5",
        "semantics-l6",
        "semantics-l7",
        "semantics-l8",
        "semantics-l9",
        "semantics-l10",
        "semantics-l12",
    ]
    assert len(task.reach_axioms) == 8
    assert task.reach_axioms[-1].label == "reach-end"
    assert len(task.lemma_instances) == 12
    assert len(task.theory_axioms) == 4


def test_every_axiom_is_closed(task):
    for item in [*task.axioms(), *task.facts]:
        assert free_vars(item.formula) == set(), item.label
    assert free_vars(task.conjecture) == set()


def test_expression_translation(program, builder):
    cond = program.body[2].body[0].cond
    expected = IntCmp(">=", VarApp("a", None, VarApp("i", l(8, IT7))), IntConst(0))
    assert eval_expr_at(cond, l(8, IT7), builder.sig) == expected


def test_not_equal_translation(builder):
    e = w.CmpOp("!=", w.VarRead("i"), w.LengthOf("a"))
    assert eval_expr_at(e, l(5), builder.sig) == Not(Eq(VarApp("i", l(5)), LengthConst("a")))


def test_initializer_update(builder, program):
    pos = builder.pos
    formula = builder.statement_semantics(program.body[0])
    assert formula == And(
        (
            Eq(VarApp("i", l(6)), IntConst(0)),
            Forall((pos,), Eq(VarApp("b", l(5), pos), VarApp("b", l(6), pos))),
            Eq(VarApp("j", l(5)), VarApp("j", l(6))),
        )
    )


def test_array_update_has_frame(builder, program):
    pos = builder.pos
    store = program.body[2].body[0].then_ctx[0]
    written = VarApp("j", l(9, IT7))
    formula = builder.statement_semantics(store)
    assert formula.args[0] == Forall(
        (pos,),
        Implies(
            Not(Eq(pos, written)),
            Eq(VarApp("b", l(10, IT7), pos), VarApp("b", l(9, IT7), pos)),
        ),
    )
    assert formula.args[1] == Eq(
        VarApp("b", l(10, IT7), written), VarApp("a", None, VarApp("i", l(9, IT7)))
    )


def test_increment_goes_to_next_iteration(builder, program):
    increment = program.body[2].body[1]
    formula = builder.statement_semantics(increment)
    assert formula.args[0] == Eq(
        VarApp("i", l(7, NatSuc(IT7))), IntOp("+", VarApp("i", l(12, IT7)), IntConst(1))
    )


def test_while_semantics(builder, program):
    loop = program.body[2]
    n7 = LastItApp("n7")

    def cond_at(t):
        return IntCmp("<", VarApp("i", t), LengthConst("a"))

    formula = builder.statement_semantics(loop)
    assert formula.args[0] == Forall(
        (IT7,), Implies(NatLeq(NatSuc(IT7), n7), cond_at(l(7, IT7)))
    )
    assert formula.args[1] == Not(cond_at(l(7, n7)))
    body_entry = formula.args[2]
    assert isinstance(body_entry, Forall) and body_entry.binders == (IT7,)
    # the exit state is copied to the end of the program
    assert formula.args[-1] == Eq(VarApp("j", END), VarApp("j", l(7, n7)))


def test_semantics_axiom_is_reach_guarded(task):
    axioms = by_label(task.semantics_axioms)
    assert isinstance(axioms["semantics-l5"], Implies)
    assert axioms["semantics-l5"].left == ReachAtom(l(5))
    guarded = axioms["semantics-l9"]
    assert isinstance(guarded, Forall) and guarded.binders == (IT7,)
    assert guarded.body.left == ReachAtom(l(9, IT7))
    assert axioms["semantics-l7"].left == ReachAtom(l(7, ZERO))


def test_reach_axioms(task):
    reach = by_label(task.reach_axioms)
    assert reach["reach-l5"] == Iff(ReachAtom(l(5)), TRUE)
    assert reach["reach-l7"] == Forall(
        (IT7,), Iff(ReachAtom(l(7, IT7)), NatLeq(IT7, LastItApp("n7")))
    )
    assert reach["reach-l9"] == Forall(
        (IT7,),
        Iff(
            ReachAtom(l(9, IT7)),
            conj(
                ReachAtom(l(8, IT7)),
                IntCmp(">=", VarApp("a", None, VarApp("i", l(8, IT7))), IntConst(0)),
            ),
        ),
    )
    in_body = conj(ReachAtom(l(7, ZERO)), NatLeq(NatSuc(IT7), LastItApp("n7")))
    assert reach["reach-l8"] == Forall((IT7,), Iff(ReachAtom(l(8, IT7)), in_body))
    assert reach["reach-end"] == Iff(ReachAtom(END), TRUE)


def test_conjecture_is_over_l_end(task):
    f = task.conjecture
    assert isinstance(f, Forall) and isinstance(f.body, Exists)
    premise = f.body.body.left
    k = f.binders[0]
    assert premise == And(
        (
            IntCmp("<=", IntConst(0), k),
            IntCmp("<", k, VarApp("j", END)),
            IntCmp(">=", LengthConst("a"), IntConst(0)),
        )
    )


def test_assert_true_gives_trivial_conjecture():
    task = build_task(parse_program("func main() {\n skip;\n}\n"))
    assert task.conjecture == TRUE
    assert len(task.semantics_axioms) == 1
    assert task.lemma_instances == ()


def test_embed_property_rejects_unknown_symbols(task):
    stray = Eq(VarApp("ghost", LocationApp("main_end")), IntConst(0))
    with pytest.raises(ScopeError, match="ghost"):
        embed_property(stray, task.signature)


def test_nested_loop_axioms_quantify_both_iterations():
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
    task = build_task(parse_program(source))
    axiom = by_label(task.semantics_axioms)["semantics-l7"]
    assert [b.name for b in axiom.binders] == ["it4", "it6"]


def test_reachability_facts(task):
    labels = [fact.label for fact in task.facts]
    assert "fact-end-l9" in labels
    assert "fact-end-main" in labels
    assert "fact-end-l7-body" in labels
    assert "fact-end-l8-else" not in labels
    assert "fact-iterations-l7" in labels
    assert "fact-body-l7" in labels


def test_embed_triple_moves_assertion_to_subprogram(program):
    model = ProgramModel(program)
    pre = IntCmp(">=", VarApp("j", LocationApp("main_end")), IntConst(0))
    post = IntCmp(">=", VarApp("j", LocationApp("main_end")), IntConst(0))
    triple = embed_triple(model, ContextRef(7, "body"), pre, post)
    assert triple == Forall(
        (IT7,),
        Implies(
            ReachAtom(l(8, IT7)),
            Implies(
                IntCmp(">=", VarApp("j", l(8, IT7)), IntConst(0)),
                IntCmp(">=", VarApp("j", l(7, NatSuc(IT7))), IntConst(0)),
            ),
        ),
    )
