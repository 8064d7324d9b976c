"""
Evaluation of trace-logic formulas over execution interpretations.

Quantifiers range over finite domains derived from the trace. Evaluation is
three-valued: True, False or None (OutOfDomain), combined with Kleene's
connectives. Dense predicates are decided directly on the trace, independent
of the definitional axiom the generator emits for them.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

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
)
from .models import CheckReport, Violation
from .oracle import END_TP, ExecutionTrace, Timepoint
from .semantics import LabeledFormula, VerificationTask

logger = logging.getLogger(__name__)

OutOfDomain = None

_DENSE = re.compile(r"^dense_l(\d+)_(.+)$")


@dataclass(frozen=True)
class EvalDomains:
    nat_bound: int  # Nat quantifiers range over 0..nat_bound
    int_window: tuple[int, ...]
    time_domain: tuple[Timepoint, ...]

    @classmethod
    def from_trace(cls, trace: ExecutionTrace) -> EvalDomains:
        longest = max(
            (trace.length(d.name) for d in trace.program.arrays), default=0
        )
        window = set(range(-2, longest + 3)) | trace.integers()
        times = dict.fromkeys([*trace.reached, END_TP])
        return cls(trace.max_iteration() + 2, tuple(sorted(window)), tuple(times))

    def values(self, sort: Sort) -> Sequence:
        match sort:
            case Sort.NAT:
                return range(self.nat_bound + 1)
            case Sort.INT:
                return self.int_window
            case Sort.TIME:
                return self.time_domain
        raise ValueError(f"no domain for {sort.value}")


class Evaluator:
    def __init__(self, trace: ExecutionTrace, dom: EvalDomains):
        self.trace = trace
        self.dom = dom
        self._consts = {d.name for d in trace.program.declarations if d.const}

    # Terms

    def term(self, t: Term, env: dict[Var, object]):
        match t:
            case Var():
                return env[t]
            case NatZero():
                return 0
            case NatSuc(arg):
                return self.term(arg, env) + 1
            case NatPred(arg):
                return max(self.term(arg, env) - 1, 0)
            case IntConst(value):
                return value
            case IntNeg(arg):
                return -self.term(arg, env)
            case IntOp(op, left, right):
                lv, rv = self.term(left, env), self.term(right, env)
                return {"+": lv + rv, "-": lv - rv, "*": lv * rv}[op]
            case LocationApp(symbol, args):
                if symbol in ("l_end", "main_end"):
                    return END_TP
                return (symbol, tuple(self.term(a, env) for a in args))
            case LastItApp(symbol, args):
                return self.trace.last_iteration(
                    symbol, tuple(self.term(a, env) for a in args)
                )
            case VarApp(var, tp, pos):
                position = None if pos is None else self.term(pos, env)
                if var in self._consts:
                    return self.trace.const_value(var, position)
                return self.trace.value(var, self.term(tp, env), position)
            case LengthConst(array):
                return self.trace.length(array)
        raise ValueError(f"cannot evaluate term {t!r}")

    # Formulas

    def formula(self, f: Formula, env: dict[Var, object]) -> bool | None:
        match f:
            case Top():
                return True
            case Bottom():
                return False
            case Eq(left, right):
                return self.term(left, env) == self.term(right, env)
            case NatLeq(left, right):
                return self.term(left, env) <= self.term(right, env)
            case IntCmp(op, left, right):
                lv, rv = self.term(left, env), self.term(right, env)
                return {"<": lv < rv, "<=": lv <= rv, ">": lv > rv, ">=": lv >= rv}[op]
            case ReachAtom(tp):
                return self.trace.is_reached(self.term(tp, env))
            case PredApp(symbol, args):
                return self.dense(symbol, tuple(self.term(a, env) for a in args))
            case Not(arg):
                value = self.formula(arg, env)
                return None if value is None else not value
            case And(args):
                return _kleene_and(self.formula(a, env) for a in args)
            case Or(args):
                return _kleene_or(self.formula(a, env) for a in args)
            case Implies(left, right):
                if isinstance(left, (Forall, Exists)):
                    # quantified premise: try the consequent first
                    rv = self.formula(right, env)
                    if rv is True:
                        return True
                    lv = self.formula(left, env)
                else:
                    lv = self.formula(left, env)
                    if lv is False:
                        return True
                    rv = self.formula(right, env)
                if lv is False or rv is True:
                    return True
                if lv is None or rv is None:
                    return None
                return False
            case Iff(left, right):
                lv, rv = self.formula(left, env), self.formula(right, env)
                if lv is None or rv is None:
                    return None
                return lv == rv
            case Forall(binders, body):
                return _kleene_and(
                    self.formula(body, {**env, **binding})
                    for binding in self.bindings(binders)
                )
            case Exists(binders, body):
                found = _kleene_or(
                    self.formula(body, {**env, **binding})
                    for binding in self.bindings(binders)
                )
                # no witness inside the finite domain says nothing about the full one
                return None if found is False else found
        raise ValueError(f"cannot evaluate formula {f!r}")

    def bindings(self, binders: Sequence[Var]) -> Iterable[dict[Var, object]]:
        domains = [self.dom.values(b.sort) for b in binders]
        for values in itertools.product(*domains):
            yield dict(zip(binders, values))

    def dense(self, symbol: str, encl: tuple[int, ...]) -> bool:
        """Every iteration below lastIt keeps the variable or adds one."""
        match = _DENSE.match(symbol)
        if match is None:
            raise ValueError(f"unknown predicate {symbol}")
        line, var = match.group(1), match.group(2)
        last = self.trace.last_iteration(f"n{line}", encl)
        for k in range(last):
            before = self.trace.value(var, (f"l{line}", encl + (k,)))
            after = self.trace.value(var, (f"l{line}", encl + (k + 1,)))
            if after - before not in (0, 1):
                return False
        return True


def _kleene_and(values: Iterable[bool | None]) -> bool | None:
    unknown = False
    for value in values:
        if value is False:
            return False
        if value is None:
            unknown = True
    return None if unknown else True


def _kleene_or(values: Iterable[bool | None]) -> bool | None:
    unknown = False
    for value in values:
        if value is True:
            return True
        if value is None:
            unknown = True
    return None if unknown else False


def eval_formula(
    f: Formula, trace: ExecutionTrace, dom: EvalDomains | None = None
) -> bool | None:
    """Truth value of a closed formula on a trace; None means OutOfDomain."""
    return Evaluator(trace, dom or EvalDomains.from_trace(trace)).formula(f, {})


def falsifying_grounding(
    f: Formula, trace: ExecutionTrace, dom: EvalDomains
) -> tuple[bool | None, dict[str, object]]:
    """Evaluate f; on False also return values of its leading universals that falsify it."""
    evaluator = Evaluator(trace, dom)
    binders: list[Var] = []
    while isinstance(f, Forall):
        binders.extend(f.binders)
        f = f.body
    unknown = False
    for binding in evaluator.bindings(binders):
        value = evaluator.formula(f, binding)
        if value is False:
            return False, {v.name: _plain(x) for v, x in binding.items()}
        if value is None:
            unknown = True
    return (None if unknown else True), {}


def _plain(value: object) -> object:
    if isinstance(value, tuple):
        symbol, iters = value
        return f"{symbol}({','.join(map(str, iters))})" if iters else symbol
    return value


def _kind(label: str) -> str:
    prefix = label.split("-", 1)[0]
    return {
        "nat": "theory",
        "semantics": "semantics",
        "reach": "reach",
        "lemma": "lemma",
        "fact": "fact",
    }.get(prefix, "theory")


def check_task(
    task: VerificationTask,
    traces: Sequence[ExecutionTrace],
    name: str = "program",
    dom: EvalDomains | None = None,
) -> CheckReport:
    """
    Evaluate every axiom, lemma instance, reachability fact and the conjecture
    on every terminated trace.

    A false axiom, lemma or fact is a generator bug; a false conjecture is a
    counterexample to the program's assertion.
    """
    report = CheckReport(program=name)
    items = [*task.axioms(), *task.facts, LabeledFormula("conjecture", task.conjecture)]
    for index, trace in enumerate(traces):
        if not trace.terminated:
            report.nonterminating += 1
            continue
        report.traces += 1
        domains = dom or EvalDomains.from_trace(trace)
        for item in items:
            report.checks += 1
            value, grounding = falsifying_grounding(item.formula, trace, domains)
            if value is None:
                report.out_of_domain += 1
                logger.debug("%s out of domain on trace %d", item.label, index)
            elif value is False:
                kind = "conjecture" if item.label == "conjecture" else _kind(item.label)
                violation = Violation(
                    label=item.label,
                    kind=kind,
                    trace_index=index,
                    valuation=trace.inputs.describe(),
                    grounding={k: v for k, v in grounding.items() if isinstance(v, int)},
                )
                logger.info("violation: %s", violation.describe())
                report.violations.append(violation)
    return report
