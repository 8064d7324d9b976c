"""
Trace lemma instances.

For every while-statement w and mutable int variable v the generator emits a
Dense definition plus A1 (equality and <=), B1 and B2; for every mutable array
the two A1 instances lifted over an outer position quantifier. Enclosing loop
iterations of w are quantified outermost. No instance mentions Reach.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from . import syntax as w
from .logic import (
    ZERO,
    Eq,
    Exists,
    Formula,
    Iff,
    Implies,
    IntCmp,
    IntConst,
    IntOp,
    NatLeq,
    NatSuc,
    Not,
    Or,
    PredApp,
    Sort,
    Term,
    Var,
    VarApp,
    conj,
    forall,
    nat_lt,
)
from .program_model import ProgramModel, dense_symbol, iteration_var

LemmaKind = Literal["dense", "a1-eq", "a1-leq", "b1", "b2"]


@dataclass(frozen=True)
class LemmaInstance:
    kind: LemmaKind
    loop: int  # line of the while-statement
    variable: str
    formula: Formula

    @property
    def label(self) -> str:
        return f"lemma-l{self.loop}-{self.variable}-{self.kind}"


class _LoopView:
    """Timepoints of one loop for one variable, with fresh bound names."""

    def __init__(self, model: ProgramModel, loop: w.While, var: w.VarDecl):
        self.model = model
        self.loop = loop
        self.var = var
        self.encl = model.enclosing_iterations(loop)
        self.last = model.last_it_of(loop)
        fresh = model.fresh_name
        self.it = Var(fresh("it"), Sort.NAT)
        self.pos = Var(fresh("pos"), Sort.INT)

    def tp(self, t: Term):
        iters = {v: v for v in self.encl}
        iters[iteration_var(self.loop)] = t
        return self.model.tp_of(self.loop, iters)

    def value(self, t: Term) -> VarApp:
        if self.var.is_array:
            return VarApp(self.var.name, self.tp(t), self.pos)
        return VarApp(self.var.name, self.tp(t))

    def step(self, t: Term) -> Formula:
        """v increments by exactly one from iteration t to suc(t)."""
        return Eq(self.value(NatSuc(t)), IntOp("+", self.value(t), IntConst(1)))

    def dense(self) -> PredApp:
        return PredApp(dense_symbol(self.loop, self.var.name), tuple(self.encl))


def dense_formula(model: ProgramModel, loop: w.While, var: w.VarDecl) -> Formula:
    """Per iteration before lastIt, v stays equal or increments by one."""
    lv = _LoopView(model, loop, var)
    it = lv.it
    return forall(
        (it,),
        Implies(
            nat_lt(it, lv.last),
            Or((Eq(lv.value(NatSuc(it)), lv.value(it)), lv.step(it))),
        ),
    )


def _relation(rel: str, left: Term, right: Term) -> Formula:
    return Eq(left, right) if rel == "eq" else IntCmp("<=", left, right)


def lemma_dense(model: ProgramModel, loop: w.While, var: w.VarDecl) -> LemmaInstance:
    lv = _LoopView(model, loop, var)
    formula = forall(lv.encl, Iff(lv.dense(), dense_formula(model, loop, var)))
    return LemmaInstance("dense", loop.line, var.name, formula)


def lemma_a1(
    model: ProgramModel, loop: w.While, var: w.VarDecl, rel: Literal["eq", "leq"]
) -> LemmaInstance:
    """Value evolution: a relation preserved by every step from bl holds up to br."""
    lv = _LoopView(model, loop, var)
    bl = Var(model.fresh_name("bl"), Sort.NAT)
    br = Var(model.fresh_name("br"), Sort.NAT)
    it = lv.it
    at_bl = lv.value(bl)
    step = forall(
        (it,),
        Implies(
            conj(NatLeq(bl, it), nat_lt(it, br), _relation(rel, at_bl, lv.value(it))),
            _relation(rel, at_bl, lv.value(NatSuc(it))),
        ),
    )
    body = forall(
        (bl, br),
        Implies(step, Implies(NatLeq(bl, br), _relation(rel, at_bl, lv.value(br)))),
    )
    if var.is_array:
        body = forall((lv.pos,), body)
    return LemmaInstance(f"a1-{rel}", loop.line, var.name, forall(lv.encl, body))


def lemma_b1(model: ProgramModel, loop: w.While, var: w.VarDecl) -> LemmaInstance:
    """Intermediate value: a dense v passes through every value it skips over."""
    lv = _LoopView(model, loop, var)
    x = Var(model.fresh_name("x"), Sort.INT)
    it = lv.it
    premise = conj(
        lv.dense(),
        IntCmp("<=", lv.value(ZERO), x),
        IntCmp("<", x, lv.value(lv.last)),
    )
    witness = Exists(
        (it,), conj(nat_lt(it, lv.last), Eq(lv.value(it), x), lv.step(it))
    )
    formula = forall(lv.encl, forall((x,), Implies(premise, witness)))
    return LemmaInstance("b1", loop.line, var.name, formula)


def lemma_b2(model: ProgramModel, loop: w.While, var: w.VarDecl) -> LemmaInstance:
    """Injectivity: after an increment a dense v never returns to the old value."""
    lv = _LoopView(model, loop, var)
    it1 = Var(model.fresh_name("it_a"), Sort.NAT)
    it2 = Var(model.fresh_name("it_b"), Sort.NAT)
    premise = conj(
        lv.dense(),
        lv.step(it1),
        nat_lt(it1, it2),
        NatLeq(it2, lv.last),
    )
    conclusion = Not(Eq(lv.value(it1), lv.value(it2)))
    formula = forall(lv.encl, forall((it1, it2), Implies(premise, conclusion)))
    return LemmaInstance("b2", loop.line, var.name, formula)


def instantiate_all(p: w.Program, model: ProgramModel | None = None) -> list[LemmaInstance]:
    model = model or ProgramModel(p)
    instances: list[LemmaInstance] = []
    for loop in p.loops():
        for var in p.mutable_vars:
            if var.is_array:
                instances.append(lemma_a1(model, loop, var, "eq"))
                instances.append(lemma_a1(model, loop, var, "leq"))
                continue
            instances.append(lemma_dense(model, loop, var))
            instances.append(lemma_a1(model, loop, var, "eq"))
            instances.append(lemma_a1(model, loop, var, "leq"))
            instances.append(lemma_b1(model, loop, var))
            instances.append(lemma_b2(model, loop, var))
    return instances
