"""
Many-sorted trace-logic terms and formulas.

Terms and formulas are immutable trees of frozen dataclasses with structural
equality. Sorts are Nat (loop iterations, term algebra zero/suc), Int
(program values), Time (timepoints) and Bool. Nat and Int never mix.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Union

from .errors import SortError


class Sort(str, Enum):
    NAT = "Nat"
    INT = "Int"
    TIME = "Time"
    BOOL = "Bool"


# Terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True, slots=True)
class NatZero:
    pass


@dataclass(frozen=True, slots=True)
class NatSuc:
    arg: Term


@dataclass(frozen=True, slots=True)
class NatPred:
    arg: Term


@dataclass(frozen=True, slots=True)
class IntConst:
    value: int


@dataclass(frozen=True, slots=True)
class IntOp:
    op: str  # one of + - *
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class IntNeg:
    arg: Term


@dataclass(frozen=True, slots=True)
class LocationApp:
    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class LastItApp:
    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class VarApp:
    """A program variable read: v(tp), v(tp, pos), v or v(pos) for consts."""

    var: str
    timepoint: Term | None = None
    position: Term | None = None


@dataclass(frozen=True, slots=True)
class LengthConst:
    array: str


Term = Union[
    Var,
    NatZero,
    NatSuc,
    NatPred,
    IntConst,
    IntOp,
    IntNeg,
    LocationApp,
    LastItApp,
    VarApp,
    LengthConst,
]

ZERO = NatZero()


# Formulas


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bottom:
    pass


@dataclass(frozen=True, slots=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class NatLeq:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class IntCmp:
    op: str  # one of < <= > >=
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class ReachAtom:
    timepoint: Term


@dataclass(frozen=True, slots=True)
class PredApp:
    """Application of a defined predicate over Nat arguments."""

    symbol: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Not:
    arg: Formula


@dataclass(frozen=True, slots=True)
class And:
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Or:
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff:
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Forall:
    binders: tuple[Var, ...]
    body: Formula


@dataclass(frozen=True, slots=True)
class Exists:
    binders: tuple[Var, ...]
    body: Formula


Formula = Union[
    Top,
    Bottom,
    Eq,
    NatLeq,
    IntCmp,
    ReachAtom,
    PredApp,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
]

TRUE = Top()
FALSE = Bottom()

INT_CMP_OPS = ("<", "<=", ">", ">=")
INT_ARITH_OPS = ("+", "-", "*")


# Constructors


def suc(t: Term) -> NatSuc:
    return NatSuc(t)


def numeral(k: int) -> Term:
    """suc^k(zero)."""
    t: Term = ZERO
    for _ in range(k):
        t = NatSuc(t)
    return t


def numeral_value(t: Term) -> int | None:
    """Inverse of numeral; None if t is not a closed numeral."""
    k = 0
    while isinstance(t, NatSuc):
        k += 1
        t = t.arg
    return k if isinstance(t, NatZero) else None


def nat_lt(left: Term, right: Term) -> NatLeq:
    # x < y is kept in the normal form suc(x) <= y
    return NatLeq(NatSuc(left), right)


def conj(*formulas: Formula) -> Formula:
    """Conjunction that flattens nested Ands and drops TRUE conjuncts."""
    args: list[Formula] = []
    for f in formulas:
        if isinstance(f, Top):
            continue
        if isinstance(f, And):
            args.extend(a for a in f.args if not isinstance(a, Top))
        else:
            args.append(f)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def forall(binders: Iterable[Var], body: Formula) -> Formula:
    binders = tuple(binders)
    return Forall(binders, body) if binders else body


def exists(binders: Iterable[Var], body: Formula) -> Formula:
    binders = tuple(binders)
    return Exists(binders, body) if binders else body


# Signature lookup used by sort checking


class SymbolTable(Protocol):
    def location_arity(self, symbol: str) -> int | None: ...

    def last_it_arity(self, symbol: str) -> int | None: ...

    def predicate_arity(self, symbol: str) -> int | None: ...

    def variable_shape(self, name: str) -> tuple[bool, bool] | None:
        """(takes timepoint, takes position) for a program variable."""
        ...

    def has_length(self, array: str) -> bool: ...


# Traversal


def term_children(t: Term) -> tuple[Term, ...]:
    match t:
        case NatSuc(arg) | NatPred(arg) | IntNeg(arg):
            return (arg,)
        case IntOp(_, left, right):
            return (left, right)
        case LocationApp(_, args) | LastItApp(_, args):
            return args
        case VarApp(_, tp, pos):
            return tuple(x for x in (tp, pos) if x is not None)
        case _:
            return ()


def atom_terms(f: Formula) -> tuple[Term, ...]:
    match f:
        case Eq(left, right) | NatLeq(left, right) | IntCmp(_, left, right):
            return (left, right)
        case ReachAtom(tp):
            return (tp,)
        case PredApp(_, args):
            return args
        case _:
            return ()


def _formula_children(f: Formula) -> tuple[Formula, ...]:
    match f:
        case Not(arg):
            return (arg,)
        case And(args) | Or(args):
            return args
        case Implies(left, right) | Iff(left, right):
            return (left, right)
        case Forall(_, body) | Exists(_, body):
            return (body,)
        case _:
            return ()


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    for child in term_children(t):
        yield from iter_subterms(child)


def iter_subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for child in _formula_children(f):
        yield from iter_subformulas(child)


def term_vars(t: Term) -> frozenset[Var]:
    return frozenset(s for s in iter_subterms(t) if isinstance(s, Var))


def is_ground(t: Term) -> bool:
    return not term_vars(t)


def free_vars(f: Formula) -> frozenset[Var]:
    match f:
        case Forall(binders, body) | Exists(binders, body):
            return free_vars(body) - frozenset(binders)
        case _:
            found: set[Var] = set()
            for t in atom_terms(f):
                found |= term_vars(t)
            for child in _formula_children(f):
                found |= free_vars(child)
            return frozenset(found)


def formula_symbols(f: Formula) -> set[str]:
    """Names of all function and predicate symbols occurring in f."""
    names: set[str] = set()
    for sub in iter_subformulas(f):
        if isinstance(sub, ReachAtom):
            names.add("Reach")
        if isinstance(sub, PredApp):
            names.add(sub.symbol)
        for t in atom_terms(sub):
            for s in iter_subterms(t):
                match s:
                    case LocationApp(symbol, _) | LastItApp(symbol, _):
                        names.add(symbol)
                    case VarApp(var, _, _):
                        names.add(var)
                    case LengthConst(array):
                        names.add(f"{array}_length")
    return names


# Sort checking


def sort_of(t: Term, sig: SymbolTable, path: tuple[str, ...] = ()) -> Sort:
    match t:
        case Var(_, sort):
            return sort
        case NatZero():
            return Sort.NAT
        case NatSuc(arg) | NatPred(arg):
            _expect(arg, Sort.NAT, sig, path + (type(t).__name__,))
            return Sort.NAT
        case IntConst(_):
            return Sort.INT
        case IntOp(op, left, right):
            if op not in INT_ARITH_OPS:
                raise SortError(f"unknown arithmetic operator {op!r}", path)
            _expect(left, Sort.INT, sig, path + (f"{op}.left",))
            _expect(right, Sort.INT, sig, path + (f"{op}.right",))
            return Sort.INT
        case IntNeg(arg):
            _expect(arg, Sort.INT, sig, path + ("neg",))
            return Sort.INT
        case LocationApp(symbol, args):
            _check_nat_args(symbol, args, sig.location_arity(symbol), sig, path)
            return Sort.TIME
        case LastItApp(symbol, args):
            _check_nat_args(symbol, args, sig.last_it_arity(symbol), sig, path)
            return Sort.NAT
        case VarApp(var, tp, pos):
            shape = sig.variable_shape(var)
            if shape is None:
                raise SortError(f"unknown program variable {var!r}", path)
            takes_time, takes_pos = shape
            if takes_time != (tp is not None) or takes_pos != (pos is not None):
                raise SortError(f"wrong argument shape for {var!r}", path)
            if tp is not None:
                _expect(tp, Sort.TIME, sig, path + (f"{var}.time",))
            if pos is not None:
                _expect(pos, Sort.INT, sig, path + (f"{var}.pos",))
            return Sort.INT
        case LengthConst(array):
            if not sig.has_length(array):
                raise SortError(f"{array!r} has no length", path)
            return Sort.INT
    raise SortError(f"not a term: {t!r}", path)


def _expect(t: Term, sort: Sort, sig: SymbolTable, path: tuple[str, ...]) -> None:
    actual = sort_of(t, sig, path)
    if actual is not sort:
        raise SortError(f"expected {sort.value}, found {actual.value}", path)


def _check_nat_args(symbol, args, arity, sig, path) -> None:
    if arity is None:
        raise SortError(f"unknown symbol {symbol!r}", path)
    if len(args) != arity:
        raise SortError(f"{symbol} expects {arity} arguments, got {len(args)}", path)
    for i, arg in enumerate(args):
        _expect(arg, Sort.NAT, sig, path + (f"{symbol}[{i}]",))


def sort_check(f: Formula, sig: SymbolTable, path: tuple[str, ...] = ()) -> None:
    """Raise SortError (with the path to the offending node) unless f is well-sorted."""
    _sort_check(f, sig, path, {})


def _sort_check(f, sig, path, scope: dict[str, Sort]) -> None:
    for t in atom_terms(f):
        for v in term_vars(t):
            bound = scope.get(v.name)
            if bound is not None and bound is not v.sort:
                raise SortError(f"{v.name} is bound as {bound.value}", path)
    match f:
        case Top() | Bottom():
            return
        case Eq(left, right):
            ls = sort_of(left, sig, path + ("Eq.left",))
            rs = sort_of(right, sig, path + ("Eq.right",))
            if ls is not rs:
                raise SortError(f"equality between {ls.value} and {rs.value}", path)
        case NatLeq(left, right):
            _expect(left, Sort.NAT, sig, path + ("leq.left",))
            _expect(right, Sort.NAT, sig, path + ("leq.right",))
        case IntCmp(op, left, right):
            if op not in INT_CMP_OPS:
                raise SortError(f"unknown comparison {op!r}", path)
            _expect(left, Sort.INT, sig, path + (f"{op}.left",))
            _expect(right, Sort.INT, sig, path + (f"{op}.right",))
        case ReachAtom(tp):
            _expect(tp, Sort.TIME, sig, path + ("Reach",))
        case PredApp(symbol, args):
            _check_nat_args(symbol, args, sig.predicate_arity(symbol), sig, path)
        case Not(arg):
            _sort_check(arg, sig, path + ("Not",), scope)
        case And(args) | Or(args):
            for i, arg in enumerate(args):
                _sort_check(arg, sig, path + (f"{type(f).__name__}[{i}]",), scope)
        case Implies(left, right) | Iff(left, right):
            name = type(f).__name__
            _sort_check(left, sig, path + (f"{name}.left",), scope)
            _sort_check(right, sig, path + (f"{name}.right",), scope)
        case Forall(binders, body) | Exists(binders, body):
            inner = dict(scope)
            for b in binders:
                if b.sort is Sort.BOOL:
                    raise SortError(f"cannot quantify over Bool ({b.name})", path)
                inner[b.name] = b.sort
            _sort_check(body, sig, path + (type(f).__name__,), inner)
        case _:
            raise SortError(f"not a formula: {f!r}", path)


# Substitution


def substitute_term(t: Term, mapping: Mapping[Var, Term]) -> Term:
    match t:
        case Var():
            return mapping.get(t, t)
        case NatZero() | IntConst() | LengthConst():
            return t
        case NatSuc(arg):
            return NatSuc(substitute_term(arg, mapping))
        case NatPred(arg):
            return NatPred(substitute_term(arg, mapping))
        case IntNeg(arg):
            return IntNeg(substitute_term(arg, mapping))
        case IntOp(op, left, right):
            return IntOp(op, substitute_term(left, mapping), substitute_term(right, mapping))
        case LocationApp(symbol, args):
            return LocationApp(symbol, tuple(substitute_term(a, mapping) for a in args))
        case LastItApp(symbol, args):
            return LastItApp(symbol, tuple(substitute_term(a, mapping) for a in args))
        case VarApp(var, tp, pos):
            return VarApp(
                var,
                None if tp is None else substitute_term(tp, mapping),
                None if pos is None else substitute_term(pos, mapping),
            )
    raise TypeError(f"not a term: {t!r}")


def substitute(f: Formula, mapping: Mapping[Var, Term]) -> Formula:
    """Capture-avoiding substitution of variables by terms."""
    if not mapping:
        return f
    match f:
        case Top() | Bottom():
            return f
        case Eq(left, right):
            return Eq(substitute_term(left, mapping), substitute_term(right, mapping))
        case NatLeq(left, right):
            return NatLeq(substitute_term(left, mapping), substitute_term(right, mapping))
        case IntCmp(op, left, right):
            return IntCmp(
                op, substitute_term(left, mapping), substitute_term(right, mapping)
            )
        case ReachAtom(tp):
            return ReachAtom(substitute_term(tp, mapping))
        case PredApp(symbol, args):
            return PredApp(symbol, tuple(substitute_term(a, mapping) for a in args))
        case Not(arg):
            return Not(substitute(arg, mapping))
        case And(args):
            return And(tuple(substitute(a, mapping) for a in args))
        case Or(args):
            return Or(tuple(substitute(a, mapping) for a in args))
        case Implies(left, right):
            return Implies(substitute(left, mapping), substitute(right, mapping))
        case Iff(left, right):
            return Iff(substitute(left, mapping), substitute(right, mapping))
        case Forall(binders, body) | Exists(binders, body):
            inner = {v: t for v, t in mapping.items() if v not in binders}
            if not inner:
                return f
            incoming = frozenset().union(*(term_vars(t) for t in inner.values()))
            taken = {v.name for v in incoming} | {v.name for v in free_vars(body)}
            new_binders = []
            for b in binders:
                if b.name in {v.name for v in incoming}:
                    fresh = _fresh_var(b, taken)
                    taken.add(fresh.name)
                    inner[b] = fresh
                    new_binders.append(fresh)
                else:
                    new_binders.append(b)
            return type(f)(tuple(new_binders), substitute(body, inner))
    raise TypeError(f"not a formula: {f!r}")


def _fresh_var(v: Var, taken: set[str]) -> Var:
    for i in itertools.count(1):
        name = f"{v.name}_{i}"
        if name not in taken:
            return Var(name, v.sort)
    raise AssertionError("unreachable")


class Grounding:
    """A total map from Nat-sorted variables to variable-free Nat terms."""

    def __init__(self, bindings: Mapping[Var, Term] | None = None):
        self._bindings: dict[Var, Term] = {}
        for var, term in (bindings or {}).items():
            if var.sort is not Sort.NAT:
                raise SortError(f"grounding of non-Nat variable {var.name}")
            if not is_ground(term):
                raise SortError(f"grounding term for {var.name} is not ground")
            self._bindings[var] = term

    @classmethod
    def of_numbers(cls, values: Mapping[Var, int]) -> Grounding:
        return cls({v: numeral(k) for v, k in values.items()})

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(self._bindings)

    def items(self):
        return self._bindings.items()

    def __getitem__(self, var: Var) -> Term:
        return self._bindings[var]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Grounding) and self._bindings == other._bindings

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name}->{t!r}" for v, t in self._bindings.items())
        return f"Grounding({inner})"

    def after(self, first: Grounding) -> Grounding:
        """Composition self . first: apply first, then self."""
        combined = {v: substitute_term(t, self._bindings) for v, t in first.items()}
        for v, t in self._bindings.items():
            combined.setdefault(v, t)
        return Grounding(combined)


def apply_grounding(f: Formula, g: Grounding) -> Formula:
    return substitute(f, dict(g.items()))


def replace_in_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    match t:
        case NatSuc(arg):
            return NatSuc(replace_in_term(arg, old, new))
        case NatPred(arg):
            return NatPred(replace_in_term(arg, old, new))
        case IntNeg(arg):
            return IntNeg(replace_in_term(arg, old, new))
        case IntOp(op, left, right):
            return IntOp(op, replace_in_term(left, old, new), replace_in_term(right, old, new))
        case LocationApp(symbol, args):
            return LocationApp(symbol, tuple(replace_in_term(a, old, new) for a in args))
        case LastItApp(symbol, args):
            return LastItApp(symbol, tuple(replace_in_term(a, old, new) for a in args))
        case VarApp(var, tp, pos):
            return VarApp(
                var,
                None if tp is None else replace_in_term(tp, old, new),
                None if pos is None else replace_in_term(pos, old, new),
            )
    return t


def replace_term(f: Formula, old: Term, new: Term) -> Formula:
    """Replace every occurrence of the closed term old by new."""
    match f:
        case Top() | Bottom():
            return f
        case Eq(left, right):
            return Eq(replace_in_term(left, old, new), replace_in_term(right, old, new))
        case NatLeq(left, right):
            return NatLeq(replace_in_term(left, old, new), replace_in_term(right, old, new))
        case IntCmp(op, left, right):
            return IntCmp(
                op, replace_in_term(left, old, new), replace_in_term(right, old, new)
            )
        case ReachAtom(tp):
            return ReachAtom(replace_in_term(tp, old, new))
        case PredApp(symbol, args):
            return PredApp(symbol, tuple(replace_in_term(a, old, new) for a in args))
        case Not(arg):
            return Not(replace_term(arg, old, new))
        case And(args):
            return And(tuple(replace_term(a, old, new) for a in args))
        case Or(args):
            return Or(tuple(replace_term(a, old, new) for a in args))
        case Implies(left, right):
            return Implies(replace_term(left, old, new), replace_term(right, old, new))
        case Iff(left, right):
            return Iff(replace_term(left, old, new), replace_term(right, old, new))
        case Forall(binders, body):
            return Forall(binders, replace_term(body, old, new))
        case Exists(binders, body):
            return Exists(binders, replace_term(body, old, new))
    raise TypeError(f"not a formula: {f!r}")
