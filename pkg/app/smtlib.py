"""
SMT-LIB 2.6 emission of verification tasks.

Time is an uninterpreted sort. Nat is either an uninterpreted sort with the
zero/suc/pred/leq axioms (algebraic mode) or the non-negative integers with
explicit guards on quantifiers and last-iteration symbols (integer mode).
"""

from __future__ import annotations

from .errors import UnsupportedFeature
from .logic import (
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    IntCmp,
    IntConst,
    IntNeg,
    IntOp,
    LastItApp,
    LengthConst,
    LocationApp,
    NatLeq,
    NatPred,
    NatSuc,
    NatZero,
    Not,
    Or,
    PredApp,
    ReachAtom,
    Sort,
    Term,
    Top,
    Var,
    VarApp,
    atom_terms,
    free_vars,
    iter_subformulas,
    iter_subterms,
)
from .models import EmissionConfig
from .semantics import VerificationTask


class SmtLibWriter:
    def __init__(self, cfg: EmissionConfig):
        self.cfg = cfg
        self.integer_nat = cfg.nat_mode == "integer"

    # Sorts

    def sort(self, sort: Sort) -> str:
        if sort is Sort.NAT and self.integer_nat:
            return "Int"
        if sort is Sort.BOOL:
            return "Bool"
        return sort.value

    # Terms

    def term(self, t: Term) -> str:
        match t:
            case Var(name, _):
                return name
            case NatZero():
                return "0" if self.integer_nat else "zero"
            case NatSuc(arg):
                return f"(+ {self.term(arg)} 1)" if self.integer_nat else f"(suc {self.term(arg)})"
            case NatPred(arg):
                return f"(- {self.term(arg)} 1)" if self.integer_nat else f"(pred {self.term(arg)})"
            case IntConst(value):
                return str(value) if value >= 0 else f"(- {-value})"
            case IntNeg(arg):
                return f"(- {self.term(arg)})"
            case IntOp(op, left, right):
                return f"({op} {self.term(left)} {self.term(right)})"
            case LocationApp(symbol, args) | LastItApp(symbol, args):
                return self._apply(symbol, [self.term(a) for a in args])
            case VarApp(var, tp, pos):
                args = [self.term(a) for a in (tp, pos) if a is not None]
                return self._apply(var, args)
            case LengthConst(array):
                return f"{array}_length"
        raise UnsupportedFeature(f"cannot emit term {t!r}")

    @staticmethod
    def _apply(symbol: str, args: list[str]) -> str:
        return f"({symbol} {' '.join(args)})" if args else symbol

    # Formulas

    def formula(self, f: Formula) -> str:
        match f:
            case Top():
                return "true"
            case Bottom():
                return "false"
            case Eq(left, right):
                return f"(= {self.term(left)} {self.term(right)})"
            case NatLeq(left, right):
                head = "<=" if self.integer_nat else "leq"
                return f"({head} {self.term(left)} {self.term(right)})"
            case IntCmp(op, left, right):
                return f"({op} {self.term(left)} {self.term(right)})"
            case ReachAtom(tp):
                return f"(Reach {self.term(tp)})"
            case PredApp(symbol, args):
                return self._apply(symbol, [self.term(a) for a in args])
            case Not(arg):
                return f"(not {self.formula(arg)})"
            case And(args) | Or(args):
                if not args:
                    return "true" if isinstance(f, And) else "false"
                if len(args) == 1:
                    return self.formula(args[0])
                head = "and" if isinstance(f, And) else "or"
                return f"({head} {' '.join(self.formula(a) for a in args)})"
            case Implies(left, right):
                return f"(=> {self.formula(left)} {self.formula(right)})"
            case Iff(left, right):
                return f"(= {self.formula(left)} {self.formula(right)})"
            case Forall(binders, body) | Exists(binders, body):
                return self._quantifier(f, binders, body)
        raise UnsupportedFeature(f"cannot emit formula {f!r}")

    def _quantifier(self, f, binders: tuple[Var, ...], body: Formula) -> str:
        universal = isinstance(f, Forall)
        for b in binders:
            if b.sort is Sort.BOOL:
                raise UnsupportedFeature(f"quantifier over Bool variable {b.name}")
        bound = " ".join(f"({b.name} {self.sort(b.sort)})" for b in binders)
        inner = self.formula(body)
        guards = [f"(>= {b.name} 0)" for b in binders if b.sort is Sort.NAT]
        if self.integer_nat and guards:
            guard = guards[0] if len(guards) == 1 else f"(and {' '.join(guards)})"
            inner = f"(=> {guard} {inner})" if universal else f"(and {guard} {inner})"
        head = "forall" if universal else "exists"
        return f"({head} ({bound}) {inner})"

    def closed(self, f: Formula, label: str) -> str:
        loose = free_vars(f)
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise UnsupportedFeature(f"{label} has free variables: {names}")
        return self.formula(f)


def _logic_name(task: VerificationTask) -> str:
    formulas = [item.formula for item in task.axioms()] + [task.conjecture]
    for f in formulas:
        for sub in iter_subformulas(f):
            for t in atom_terms(sub):
                if any(isinstance(s, IntOp) and s.op == "*" for s in iter_subterms(t)):
                    return "UFNIA"
    return "UFLIA"


def emit_smtlib(task: VerificationTask, cfg: EmissionConfig) -> str:
    """Serialize a task; identical task and config give identical text."""
    writer = SmtLibWriter(cfg)
    sig = task.signature
    nat = writer.sort(Sort.NAT)
    out = [
        "; trace-logic verification task",
        f"; nat mode: {cfg.nat_mode}",
        f"(set-logic {_logic_name(task)})",
        "(declare-sort Time 0)",
    ]
    if writer.integer_nat:
        out.append("(define-sort Nat () Int)")
    else:
        out += [
            "(declare-sort Nat 0)",
            "(declare-fun zero () Nat)",
            "(declare-fun suc (Nat) Nat)",
            "(declare-fun pred (Nat) Nat)",
            "(declare-fun leq (Nat Nat) Bool)",
        ]

    def declare(name: str, args: list[str], result: str) -> None:
        out.append(f"(declare-fun {name} ({' '.join(args)}) {result})")

    for loc in sig.locations.values():
        declare(loc.name, [nat] * loc.iteration_arity, "Time")
    out.append("(define-fun main_end () Time l_end)")
    for n in sig.last_iterations.values():
        declare(n.name, [nat] * n.arity, nat)
    for decl in sig.variables.values():
        args = ([] if decl.const else ["Time"]) + (["Int"] if decl.is_array else [])
        declare(decl.name, args, "Int")
    for array in sig.lengths:
        declare(f"{array}_length", [], "Int")
    declare("Reach", ["Time"], "Bool")
    if task.lemma_instances:
        for symbol, arity in sig.predicates.items():
            declare(symbol, [nat] * arity, "Bool")

    if writer.integer_nat:
        for n in sig.last_iterations.values():
            bound = [f"it{i}" for i in range(n.arity)]
            value = f"({n.name} {' '.join(bound)})" if bound else n.name
            fact = f"(>= {value} 0)"
            if bound:
                binders = " ".join(f"({b} Int)" for b in bound)
                guard = " ".join(f"(>= {b} 0)" for b in bound)
                guard = guard if len(bound) == 1 else f"(and {guard})"
                fact = f"(forall ({binders}) (=> {guard} {fact}))"
            out.append(f"(assert (! {fact} :named nat-{n.name}))")

    for item in task.axioms():
        out.append(f"(assert (! {writer.closed(item.formula, item.label)} :named {item.label}))")

    conjecture = writer.closed(task.conjecture, "conjecture")
    if cfg.conjecture_mode == "assert-not":
        out.append(f"(assert-not {conjecture})")
    else:
        out.append(f"(assert (not {conjecture}))")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"
