"""
Axiomatic semantics of W programs in trace logic.

build_task assembles the signature, the Nat theory, one Reach-guarded
semantics axiom per statement, the Reach definitions, the trace lemma
instances and the conjecture into a VerificationTask.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as w
from .errors import ScopeError
from .logic import (
    TRUE,
    ZERO,
    Eq,
    Formula,
    Iff,
    Implies,
    IntCmp,
    IntConst,
    IntOp,
    LengthConst,
    NatLeq,
    NatPred,
    NatSuc,
    Not,
    Or,
    ReachAtom,
    Sort,
    Term,
    Var,
    VarApp,
    conj,
    forall,
    formula_symbols,
    nat_lt,
    replace_term,
    sort_check,
)
from .program_model import END, MAIN_END, ContextRef, ProgramModel, Signature, iteration_var


@dataclass(frozen=True)
class LabeledFormula:
    label: str
    formula: Formula


@dataclass(frozen=True)
class VerificationTask:
    program: w.Program
    signature: Signature
    theory_axioms: tuple[LabeledFormula, ...]
    semantics_axioms: tuple[LabeledFormula, ...]
    reach_axioms: tuple[LabeledFormula, ...]
    lemma_instances: tuple = ()
    conjecture: Formula = TRUE
    facts: tuple[LabeledFormula, ...] = field(default=())

    def axioms(self) -> list[LabeledFormula]:
        """Every labeled axiom in emission order."""
        lemmas = [LabeledFormula(li.label, li.formula) for li in self.lemma_instances]
        return [
            *self.theory_axioms,
            *self.semantics_axioms,
            *self.reach_axioms,
            *lemmas,
        ]


# Expression formulas


def eval_expr_at(e: w.Expression, tp: Term, sig: Signature) -> Term | Formula:
    """The value of e at timepoint tp: a Term for integer, a Formula for boolean e."""
    match e:
        case w.IntConst(value):
            return IntConst(value)
        case w.VarRead(name):
            return VarApp(name) if sig.variables[name].const else VarApp(name, tp)
        case w.ArrRead(name, index):
            pos = eval_expr_at(index, tp, sig)
            if sig.variables[name].const:
                return VarApp(name, None, pos)
            return VarApp(name, tp, pos)
        case w.LengthOf(name):
            return LengthConst(name)
        case w.ArithOp(op, left, right):
            return IntOp(op, eval_expr_at(left, tp, sig), eval_expr_at(right, tp, sig))
        case w.CmpOp(op, left, right):
            lt, rt = eval_expr_at(left, tp, sig), eval_expr_at(right, tp, sig)
            if op == "==":
                return Eq(lt, rt)
            if op == "!=":
                return Not(Eq(lt, rt))
            return IntCmp(op, lt, rt)
        case w.BoolOp("not", (arg,)):
            return Not(eval_expr_at(arg, tp, sig))
        case w.BoolOp("and", args):
            return conj(*(eval_expr_at(a, tp, sig) for a in args))
        case w.BoolOp("or", args):
            return Or(tuple(eval_expr_at(a, tp, sig) for a in args))
    raise ValueError(f"cannot translate expression {e!r}")


def eq_formula(decl: w.VarDecl, tp1: Term, tp2: Term, pos: Var) -> Formula:
    """v has the same value(s) at tp1 and tp2; TRUE for const variables."""
    if decl.const:
        return TRUE
    if decl.is_array:
        return forall(
            (pos,), Eq(VarApp(decl.name, tp1, pos), VarApp(decl.name, tp2, pos))
        )
    return Eq(VarApp(decl.name, tp1), VarApp(decl.name, tp2))


class SemanticsBuilder:
    """Generates the semantics and Reach axioms of one program."""

    def __init__(self, model: ProgramModel):
        self.model = model
        self.program = model.program
        self.sig = model.derive_signature()
        self.pos = Var(model.fresh_name("pos"), Sort.INT)

    def expr(self, e: w.Expression, tp: Term):
        return eval_expr_at(e, tp, self.sig)

    def eq(self, name: str, tp1: Term, tp2: Term) -> Formula:
        return eq_formula(self.sig.variables[name], tp1, tp2, self.pos)

    def eqall(self, tp1: Term, tp2: Term) -> Formula:
        """Conjunction of eq over all mutable variables."""
        return conj(*(self.eq(d.name, tp1, tp2) for d in self.program.mutable_vars))

    def _frame(self, target: str, tp1: Term, tp2: Term) -> list[Formula]:
        return [
            self.eq(d.name, tp1, tp2)
            for d in self.program.mutable_vars
            if d.name != target
        ]

    def update(self, var: str, e: w.Expression, tp1: Term, tp2: Term) -> Formula:
        """var(tp2) = [e](tp1), every other mutable variable unchanged."""
        return conj(
            Eq(VarApp(var, tp2), self.expr(e, tp1)), *self._frame(var, tp1, tp2)
        )

    def update_arr(
        self, var: str, index: w.Expression, value: w.Expression, tp1: Term, tp2: Term
    ) -> Formula:
        written = self.expr(index, tp1)
        untouched = forall(
            (self.pos,),
            Implies(
                Not(Eq(self.pos, written)),
                Eq(VarApp(var, tp2, self.pos), VarApp(var, tp1, self.pos)),
            ),
        )
        return conj(
            untouched,
            Eq(VarApp(var, tp2, written), self.expr(value, tp1)),
            *self._frame(var, tp1, tp2),
        )

    # Statements

    def statement_semantics(self, s: w.Statement) -> Formula:
        m = self.model
        match s:
            case w.Skip():
                return self.eqall(m.end_of(s), m.start_of(s))
            case w.IntAssign(target, e):
                return self.update(target, e, m.start_of(s), m.end_of(s))
            case w.ArrAssign(target, index, value):
                return self.update_arr(target, index, value, m.start_of(s), m.end_of(s))
            case w.IfThenElse(cond, _, _):
                start = m.start_of(s)
                holds = self.expr(cond, start)
                then_start = m.branch_start(ContextRef(s.line, "then"))
                else_start = m.branch_start(ContextRef(s.line, "else"))
                return conj(
                    Implies(holds, self.eqall(then_start, start)),
                    Implies(Not(holds), self.eqall(else_start, start)),
                )
            case w.While(cond, _):
                it = iteration_var(s)
                last = m.last_it_of(s)
                at_it = m.tp_of(s)
                at_last = m.tp_of(s, self._iters(s, last))
                body_start = m.start_of(ContextRef(s.line, "body"))
                return conj(
                    forall((it,), Implies(nat_lt(it, last), self.expr(cond, at_it))),
                    Not(self.expr(cond, at_last)),
                    forall(
                        (it,), Implies(nat_lt(it, last), self.eqall(body_start, at_it))
                    ),
                    self.eqall(m.end_of(s), at_last),
                )
        raise ValueError(f"unknown statement {s!r}")

    def _iters(self, loop: w.While, own: Term) -> dict[Var, Term]:
        iters: dict[Var, Term] = {v: v for v in self.model.enclosing_iterations(loop)}
        iters[iteration_var(loop)] = own
        return iters

    def semantics_axiom(self, s: w.Statement) -> LabeledFormula:
        guarded = Implies(ReachAtom(self.model.start_of(s)), self.statement_semantics(s))
        return LabeledFormula(
            f"semantics-l{s.line}",
            forall(self.model.enclosing_iterations(s), guarded),
        )

    # Reachability

    def context_condition(self, ref: ContextRef) -> Formula:
        """The defining condition of Reach(start_c) for context c."""
        if ref.owner is None:
            return TRUE
        m = self.model
        owner = m.statement(ref.owner)
        start = m.start_of(owner)
        match ref.branch:
            case "then":
                return conj(ReachAtom(start), self.expr(owner.cond, start))
            case "else":
                return conj(ReachAtom(start), Not(self.expr(owner.cond, start)))
            case _:
                it = iteration_var(owner)
                return conj(ReachAtom(start), nat_lt(it, m.last_it_of(owner)))

    def reach_axiom(self, s: w.Statement) -> LabeledFormula:
        m = self.model
        cond = self.context_condition(m.context_of(s))
        its = m.enclosing_iterations(s)
        if isinstance(s, w.While):
            it = iteration_var(s)
            body = Iff(ReachAtom(m.tp_of(s)), conj(cond, NatLeq(it, m.last_it_of(s))))
            its = [*its, it]
        else:
            body = Iff(ReachAtom(m.start_of(s)), cond)
        return LabeledFormula(f"reach-l{s.line}", forall(its, body))

    def reach_axioms(self) -> list[LabeledFormula]:
        axioms = [self.reach_axiom(s) for s in self.program.statements()]
        axioms.append(LabeledFormula("reach-end", Iff(ReachAtom(END), TRUE)))
        return axioms

    # Reachability facts of executions

    def reachability_facts(self) -> list[LabeledFormula]:
        m = self.model
        facts = []
        for s in self.program.statements():
            facts.append(
                LabeledFormula(
                    f"fact-end-l{s.line}",
                    forall(
                        m.enclosing_iterations(s),
                        Implies(ReachAtom(m.start_of(s)), ReachAtom(m.end_of(s))),
                    ),
                )
            )
        for ref in m.contexts():
            if not m.statements_of(ref):
                continue
            name = "main" if ref.owner is None else f"l{ref.owner}-{ref.branch}"
            facts.append(
                LabeledFormula(
                    f"fact-end-{name}",
                    forall(
                        m.context_enclosing_iterations(ref),
                        Implies(ReachAtom(m.start_of(ref)), ReachAtom(m.end_of(ref))),
                    ),
                )
            )
        for loop in self.program.loops():
            it = iteration_var(loop)
            last = m.last_it_of(loop)
            started = ReachAtom(m.start_of(loop))
            encl = m.enclosing_iterations(loop)
            facts.append(
                LabeledFormula(
                    f"fact-iterations-l{loop.line}",
                    forall(
                        encl,
                        Implies(
                            started,
                            forall(
                                (it,),
                                Implies(NatLeq(it, last), ReachAtom(m.tp_of(loop))),
                            ),
                        ),
                    ),
                )
            )
            body_start = m.start_of(ContextRef(loop.line, "body"))
            facts.append(
                LabeledFormula(
                    f"fact-body-l{loop.line}",
                    forall(
                        encl,
                        Implies(
                            started,
                            forall(
                                (it,), Implies(nat_lt(it, last), ReachAtom(body_start))
                            ),
                        ),
                    ),
                )
            )
        return facts


def nat_theory_axioms(model: ProgramModel) -> list[LabeledFormula]:
    x = Var(model.fresh_name("x"), Sort.NAT)
    y = Var(model.fresh_name("y"), Sort.NAT)
    return [
        LabeledFormula("nat-pred-suc", forall((x,), Eq(NatPred(NatSuc(x)), x))),
        LabeledFormula("nat-leq-zero", forall((x,), NatLeq(ZERO, x))),
        LabeledFormula(
            "nat-leq-suc",
            forall((x, y), Iff(NatLeq(NatSuc(x), NatSuc(y)), NatLeq(x, y))),
        ),
        LabeledFormula("nat-not-suc-leq-zero", forall((x,), Not(NatLeq(NatSuc(x), ZERO)))),
    ]


def embed_property(f: Formula, sig: Signature) -> Formula:
    """The assertion as a conjecture over l_end."""
    known = set(sig.symbol_names())
    unknown = sorted(formula_symbols(f) - known)
    if unknown:
        raise ScopeError(f"unknown symbols in assertion: {', '.join(unknown)}")
    conjecture = replace_term(f, MAIN_END, END)
    sort_check(conjecture, sig, ("conjecture",))
    return conjecture


def embed_triple(
    model: ProgramModel, p: w.Statement | ContextRef, pre: Formula, post: Formula
) -> Formula:
    """
    Trace-logic counterpart of the Hoare triple {pre} p {post}.

    pre and post are surface formulas whose variables are read at main_end;
    they are moved to start_p and end_p respectively.
    """
    if isinstance(p, ContextRef):
        its = model.context_enclosing_iterations(p)
    else:
        its = model.enclosing_iterations(p)
    start, end = model.start_of(p), model.end_of(p)
    body = Implies(
        ReachAtom(start),
        Implies(replace_term(pre, MAIN_END, start), replace_term(post, MAIN_END, end)),
    )
    return forall(its, body)


def reachability_facts(p: w.Program) -> list[LabeledFormula]:
    return SemanticsBuilder(ProgramModel(p)).reachability_facts()


def build_task(p: w.Program, include_lemmas: bool = True) -> VerificationTask:
    """Assemble the full verification task of a program."""
    from .lemmas import instantiate_all

    model = ProgramModel(p)
    builder = SemanticsBuilder(model)
    sig = builder.sig
    semantics = [builder.semantics_axiom(s) for s in p.statements()]
    reach = builder.reach_axioms()
    lemmas = instantiate_all(p, model) if include_lemmas else []
    task = VerificationTask(
        program=p,
        signature=sig,
        theory_axioms=tuple(nat_theory_axioms(model)),
        semantics_axioms=tuple(semantics),
        reach_axioms=tuple(reach),
        lemma_instances=tuple(lemmas),
        conjecture=embed_property(p.assertion, sig),
        facts=tuple(builder.reachability_facts()),
    )
    for item in [*task.axioms(), *task.facts]:
        sort_check(item.formula, sig, (item.label,))
    return task
