"""
Location structure of a W program.

Every statement s at source line k owns a location symbol ``l<k>`` whose
arguments are the iterations of the loops enclosing s, outermost first, plus
its own iteration if s is a while-statement. Each while-statement also owns a
last-iteration symbol ``n<k>`` and an iteration variable ``it<k>``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

from . import syntax as w
from .errors import ArityError, EmptyContextError
from .logic import ZERO, LastItApp, LocationApp, NatSuc, Sort, Term, Var

END = LocationApp("l_end")
MAIN_END = LocationApp("main_end")

Branch = Literal["main", "then", "else", "body"]


@dataclass(frozen=True)
class ContextRef:
    """A context identified by its owning statement line and branch."""

    owner: int | None
    branch: Branch


TOP = ContextRef(None, "main")


@dataclass(frozen=True)
class LocationSymbol:
    name: str
    iteration_arity: int
    owner: int | None  # statement line, None for l_end


@dataclass(frozen=True)
class LastIterationSymbol:
    name: str
    arity: int
    owner: int


@dataclass(frozen=True)
class _Placement:
    context: ContextRef
    index: int
    enclosing: tuple[w.While, ...]


def iteration_var(loop: w.While) -> Var:
    return Var(f"it{loop.line}", Sort.NAT)


def dense_symbol(loop: w.While, var: str) -> str:
    return f"dense_l{loop.line}_{var}"


@dataclass
class Signature:
    """The trace-logic signature of a program."""

    locations: dict[str, LocationSymbol] = field(default_factory=dict)
    last_iterations: dict[str, LastIterationSymbol] = field(default_factory=dict)
    variables: dict[str, w.VarDecl] = field(default_factory=dict)
    lengths: list[str] = field(default_factory=list)
    predicates: dict[str, int] = field(default_factory=dict)
    nat_symbols: tuple[str, ...] = ("zero", "suc", "pred", "leq")

    def location_arity(self, symbol: str) -> int | None:
        if symbol == "main_end":
            return 0
        loc = self.locations.get(symbol)
        return None if loc is None else loc.iteration_arity

    def last_it_arity(self, symbol: str) -> int | None:
        n = self.last_iterations.get(symbol)
        return None if n is None else n.arity

    def predicate_arity(self, symbol: str) -> int | None:
        return self.predicates.get(symbol)

    def variable_shape(self, name: str) -> tuple[bool, bool] | None:
        decl = self.variables.get(name)
        if decl is None:
            return None
        return (not decl.const, decl.is_array)

    def has_length(self, array: str) -> bool:
        return array in self.lengths

    def symbol_names(self) -> list[str]:
        names = [*self.locations, "main_end", *self.last_iterations, *self.variables]
        names += [f"{a}_length" for a in self.lengths]
        names += [*self.predicates, "Reach", *self.nat_symbols]
        return names


class ProgramModel:
    """Timepoint structure (tp, start, end, lastIt) of one program."""

    def __init__(self, program: w.Program):
        self.program = program
        self._placements: dict[int, _Placement] = {}
        self._statements: dict[int, w.Statement] = {}
        self._contexts: dict[ContextRef, w.Context] = {TOP: program.body}
        self._place(program.body, TOP, ())

    def _place(self, ctx: w.Context, ref: ContextRef, enclosing) -> None:
        for index, s in enumerate(ctx):
            self._placements[s.line] = _Placement(ref, index, enclosing)
            self._statements[s.line] = s
            match s:
                case w.IfThenElse(_, then_ctx, else_ctx):
                    for branch, sub in (("then", then_ctx), ("else", else_ctx)):
                        sub_ref = ContextRef(s.line, branch)
                        self._contexts[sub_ref] = sub
                        self._place(sub, sub_ref, enclosing)
                case w.While(_, body):
                    body_ref = ContextRef(s.line, "body")
                    self._contexts[body_ref] = body
                    self._place(body, body_ref, enclosing + (s,))

    # Lookup

    def statement(self, line: int) -> w.Statement:
        return self._statements[line]

    def statements_of(self, ref: ContextRef) -> w.Context:
        return self._contexts[ref]

    def context_of(self, s: w.Statement) -> ContextRef:
        return self._placements[s.line].context

    def contexts(self) -> list[ContextRef]:
        return list(self._contexts)

    def enclosing_loops(self, s: w.Statement) -> list[w.While]:
        """Loops strictly containing s, outermost first."""
        return list(self._placements[s.line].enclosing)

    def enclosing_iterations(self, s: w.Statement) -> list[Var]:
        return [iteration_var(loop) for loop in self.enclosing_loops(s)]

    def context_enclosing_iterations(self, ref: ContextRef) -> list[Var]:
        if ref.owner is None:
            return []
        owner = self.statement(ref.owner)
        its = self.enclosing_iterations(owner)
        if ref.branch == "body":
            its.append(iteration_var(owner))
        return its

    # Timepoints

    def _iteration_args(self, loops, iters: Mapping[Var, Term] | None, who: str):
        args = []
        for loop in loops:
            it = iteration_var(loop)
            if iters is None:
                args.append(it)
            elif it in iters:
                args.append(iters[it])
            else:
                raise ArityError(f"no iteration term for {it.name} at {who}")
        return args

    def tp_of(self, s: w.Statement, iters: Mapping[Var, Term] | None = None) -> LocationApp:
        """l_s applied to the enclosing iterations (and its own, for loops)."""
        loops = self.enclosing_loops(s)
        if isinstance(s, w.While):
            loops.append(s)
        args = self._iteration_args(loops, iters, f"l{s.line}")
        return LocationApp(f"l{s.line}", tuple(args))

    def start_of(
        self, p: w.Statement | ContextRef, iters: Mapping[Var, Term] | None = None
    ) -> LocationApp:
        if isinstance(p, ContextRef):
            ctx = self.statements_of(p)
            if not ctx:
                raise EmptyContextError(f"context {p} has no statements")
            return self.start_of(ctx[0], iters)
        if isinstance(p, w.While):
            inner = dict(iters) if iters is not None else None
            if inner is None:
                inner = {it: it for it in self.enclosing_iterations(p)}
            inner[iteration_var(p)] = ZERO
            return self.tp_of(p, inner)
        return self.tp_of(p, iters)

    def end_of(
        self, p: w.Statement | ContextRef, iters: Mapping[Var, Term] | None = None
    ) -> LocationApp:
        if isinstance(p, ContextRef):
            if p.owner is None:
                return END
            owner = self.statement(p.owner)
            if p.branch == "body":
                it = iteration_var(owner)
                current = it if iters is None else iters.get(it)
                if current is None:
                    raise ArityError(f"no iteration term for {it.name}")
                inner = dict(iters) if iters is not None else {
                    v: v for v in self.enclosing_iterations(owner)
                }
                inner[it] = NatSuc(current)
                return self.tp_of(owner, inner)
            return self.end_of(owner, iters)
        placement = self._placements[p.line]
        siblings = self.statements_of(placement.context)
        if placement.index + 1 < len(siblings):
            return self.start_of(siblings[placement.index + 1], iters)
        return self.end_of(placement.context, iters)

    def branch_start(self, ref: ContextRef, iters: Mapping[Var, Term] | None = None):
        """Start of a branch; an empty branch is entered at the end of its owner."""
        if self.statements_of(ref):
            return self.start_of(ref, iters)
        return self.end_of(ref, iters)

    def last_it_of(self, loop: w.While, iters: Mapping[Var, Term] | None = None) -> LastItApp:
        args = self._iteration_args(self.enclosing_loops(loop), iters, f"n{loop.line}")
        return LastItApp(f"n{loop.line}", tuple(args))

    # Signature

    def derive_signature(self) -> Signature:
        sig = Signature()
        for s in self.program.statements():
            arity = len(self.enclosing_loops(s)) + (1 if isinstance(s, w.While) else 0)
            name = f"l{s.line}"
            sig.locations[name] = LocationSymbol(name, arity, s.line)
        sig.locations["l_end"] = LocationSymbol("l_end", 0, None)
        for loop in self.program.loops():
            name = f"n{loop.line}"
            sig.last_iterations[name] = LastIterationSymbol(
                name, len(self.enclosing_loops(loop)), loop.line
            )
            for decl in self.program.mutable_vars:
                if not decl.is_array:
                    sig.predicates[dense_symbol(loop, decl.name)] = len(
                        self.enclosing_loops(loop)
                    )
        for decl in self.program.declarations:
            sig.variables[decl.name] = decl
            if decl.is_array:
                sig.lengths.append(decl.name)
        return sig

    @cached_property
    def _taken_names(self) -> frozenset[str]:
        return frozenset(self.derive_signature().symbol_names())

    def fresh_name(self, base: str) -> str:
        """A bound-variable name that does not clash with any program symbol."""
        name, k = base, 0
        while name in self._taken_names:
            k += 1
            name = f"{base}_{k}"
        return name


def enclosing_loops(s: w.Statement, p: w.Program) -> list[w.While]:
    return ProgramModel(p).enclosing_loops(s)


def derive_signature(p: w.Program) -> Signature:
    return ProgramModel(p).derive_signature()
