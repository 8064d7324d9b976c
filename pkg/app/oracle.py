"""
Reference interpreter for W programs.

execute() applies the small-step rules init, skip, asg, asg_arr, ite_T,
ite_F, while_T and while_F and records the execution interpretation: the
ordered set of reached ground timepoints, the program state at each of them
and the value of every last-iteration symbol that was bound on the way.

Ground timepoints are pairs ``(symbol, iterations)``, e.g. ``("l8", (2,))``
or ``("l_end", ())``. Timepoint computation here is independent of
ProgramModel so that the soundness sweep compares two implementations.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Iterator
from dataclasses import dataclass, field

from . import syntax as w
from .errors import OutOfBoundsRead, StepLimitExceeded
from .models import DEFAULT_STEP_LIMIT, InputValuation, SweepBounds

logger = logging.getLogger(__name__)

Timepoint = tuple[str, tuple[int, ...]]

END_TP: Timepoint = ("l_end", ())


def format_timepoint(tp: Timepoint) -> str:
    symbol, iters = tp
    return f"{symbol}({','.join(map(str, iters))})" if iters else symbol


@dataclass
class State:
    ints: dict[str, int] = field(default_factory=dict)
    arrays: dict[str, dict[int, int]] = field(default_factory=dict)

    def copy(self) -> State:
        return State(dict(self.ints), {k: dict(v) for k, v in self.arrays.items()})

    def render(self) -> str:
        parts = [f"{k}={v}" for k, v in sorted(self.ints.items())]
        for name, cells in sorted(self.arrays.items()):
            inner = ",".join(f"{i}:{v}" for i, v in sorted(cells.items()))
            parts.append(f"{name}={{{inner}}}")
        return " ".join(parts)


@dataclass
class ExecutionTrace:
    program: w.Program
    inputs: InputValuation
    reached: list[Timepoint] = field(default_factory=list)
    states: dict[Timepoint, State] = field(default_factory=dict)
    last_iterations: dict[tuple[str, tuple[int, ...]], int] = field(default_factory=dict)
    audit: list[tuple[Timepoint, str]] = field(default_factory=list)
    terminated: bool = False

    @property
    def step_count(self) -> int:
        return len(self.audit)

    def is_reached(self, tp: Timepoint) -> bool:
        return tp in self.states

    def value(self, var: str, tp: Timepoint, pos: int | None = None) -> int:
        """Value of a mutable variable at tp; 0 at unreached timepoints."""
        state = self.states.get(tp)
        if state is None:
            return 0
        if pos is None:
            return state.ints.get(var, 0)
        return state.arrays.get(var, {}).get(pos, 0)

    def const_value(self, var: str, pos: int | None = None) -> int:
        if pos is None:
            return self.inputs.ints.get(var, 0)
        cells = self.inputs.arrays.get(var, [])
        return cells[pos] if 0 <= pos < len(cells) else 0

    def length(self, array: str) -> int:
        if array in self.inputs.arrays:
            return len(self.inputs.arrays[array])
        return len(self.inputs.initial_arrays.get(array, []))

    def last_iteration(self, symbol: str, args: tuple[int, ...]) -> int:
        return self.last_iterations.get((symbol, args), 0)

    def max_iteration(self) -> int:
        return max(self.last_iterations.values(), default=0)

    def integers(self) -> set[int]:
        """Every integer value or position occurring in the trace."""
        found = set(self.inputs.ints.values())
        for cells in self.inputs.arrays.values():
            found.update(cells)
        for state in self.states.values():
            found.update(state.ints.values())
            for cells in state.arrays.values():
                found.update(cells)
                found.update(cells.values())
        return found


class Interpreter:
    def __init__(
        self,
        program: w.Program,
        inputs: InputValuation,
        step_limit: int = DEFAULT_STEP_LIMIT,
        permissive: bool = False,
    ):
        self.program = program
        self.inputs = inputs
        self.step_limit = step_limit
        self.permissive = permissive
        self.trace = ExecutionTrace(program, inputs)

    # Timepoints

    @staticmethod
    def start(s: w.Statement, encl: tuple[int, ...]) -> Timepoint:
        if isinstance(s, w.While):
            return (f"l{s.line}", encl + (0,))
        return (f"l{s.line}", encl)

    def visit(self, tp: Timepoint, state: State, rule: str) -> None:
        if self.trace.step_count >= self.step_limit:
            raise StepLimitExceeded(
                f"no termination within {self.step_limit} steps", trace=self.trace
            )
        self.trace.reached.append(tp)
        self.trace.states[tp] = state
        self.trace.audit.append((tp, rule))

    # Expressions

    def eval(self, e: w.Expression, state: State) -> int | bool:
        match e:
            case w.IntConst(value):
                return value
            case w.VarRead(name):
                if self.program.decl(name).const:
                    return self.inputs.ints.get(name, 0)
                return state.ints.get(name, 0)
            case w.ArrRead(name, index):
                pos = self.eval(index, state)
                if not self.program.decl(name).const:
                    return state.arrays.get(name, {}).get(pos, 0)
                cells = self.inputs.arrays.get(name, [])
                if 0 <= pos < len(cells):
                    return cells[pos]
                if self.permissive:
                    return 0
                raise OutOfBoundsRead(f"{name}[{pos}] outside length {len(cells)}")
            case w.LengthOf(name):
                return self.trace.length(name)
            case w.ArithOp(op, left, right):
                lv, rv = self.eval(left, state), self.eval(right, state)
                return {"+": lv + rv, "-": lv - rv, "*": lv * rv}[op]
            case w.CmpOp(op, left, right):
                lv, rv = self.eval(left, state), self.eval(right, state)
                match op:
                    case "<":
                        return lv < rv
                    case "<=":
                        return lv <= rv
                    case ">":
                        return lv > rv
                    case ">=":
                        return lv >= rv
                    case "==":
                        return lv == rv
                    case "!=":
                        return lv != rv
            case w.BoolOp("not", (arg,)):
                return not self.eval(arg, state)
            case w.BoolOp("and", args):
                return all(self.eval(a, state) for a in args)
            case w.BoolOp("or", args):
                return any(self.eval(a, state) for a in args)
        raise ValueError(f"cannot evaluate {e!r}")

    # Statements

    def run(self) -> ExecutionTrace:
        body = self.program.body
        self.visit(self.start(body[0], ()), self.initial_state(), "init")
        self.exec_context(body, (), self.trace.states[self.trace.reached[0]], END_TP)
        self.trace.terminated = True
        return self.trace

    def initial_state(self) -> State:
        state = State()
        for decl in self.program.mutable_vars:
            if decl.is_array:
                initial = self.inputs.initial_arrays.get(decl.name, [])
                state.arrays[decl.name] = dict(enumerate(initial))
            else:
                state.ints[decl.name] = self.inputs.initial.get(decl.name, 0)
        return state

    def exec_context(
        self, ctx: w.Context, encl: tuple[int, ...], state: State, after: Timepoint
    ) -> State:
        for index, s in enumerate(ctx):
            end = self.start(ctx[index + 1], encl) if index + 1 < len(ctx) else after
            state = self.exec_statement(s, encl, state, end)
        return state

    def exec_statement(
        self, s: w.Statement, encl: tuple[int, ...], state: State, end: Timepoint
    ) -> State:
        match s:
            case w.Skip():
                self.visit(end, state, "skip")
                return state
            case w.IntAssign(target, expr):
                new = state.copy()
                new.ints[target] = self.eval(expr, state)
                self.visit(end, new, "asg")
                return new
            case w.ArrAssign(target, index, value):
                new = state.copy()
                new.arrays.setdefault(target, {})[self.eval(index, state)] = self.eval(
                    value, state
                )
                self.visit(end, new, "asg_arr")
                return new
            case w.IfThenElse(cond, then_ctx, else_ctx):
                holds = bool(self.eval(cond, state))
                branch = then_ctx if holds else else_ctx
                rule = "ite_T" if holds else "ite_F"
                if not branch:
                    self.visit(end, state, rule)
                    return state
                self.visit(self.start(branch[0], encl), state, rule)
                return self.exec_context(branch, encl, state, end)
            case w.While(cond, body):
                k = 0
                while self.eval(cond, state):
                    inner = encl + (k,)
                    self.visit(self.start(body[0], inner), state, "while_T")
                    state = self.exec_context(body, inner, state, (f"l{s.line}", encl + (k + 1,)))
                    k += 1
                self.trace.last_iterations[(f"n{s.line}", encl)] = k
                self.visit(end, state, "while_F")
                return state
        raise ValueError(f"unknown statement {s!r}")


def execute(
    p: w.Program,
    inp: InputValuation,
    step_limit: int = DEFAULT_STEP_LIMIT,
    permissive: bool = False,
) -> ExecutionTrace:
    """
    Run p on inp and return its execution interpretation.

    Raises:
        StepLimitExceeded: More than step_limit rules applied; carries the partial trace
        OutOfBoundsRead: A const array was read outside its length (unless permissive)
    """
    trace = Interpreter(p, inp, step_limit, permissive).run()
    logger.debug("executed %d steps on %s", trace.step_count, inp.describe())
    return trace


def format_trace(trace: ExecutionTrace) -> str:
    """One line per applied rule: ``<timepoint> <rule> <var>=<value>...``."""
    lines = []
    for tp, rule in trace.audit:
        state = trace.states[tp].render()
        lines.append(f"{format_timepoint(tp)} {rule} {state}".rstrip())
    return "\n".join(lines) + "\n"


# Input sampling


def _boundary_valuations(p: w.Program, bounds: SweepBounds) -> Iterator[InputValuation]:
    consts = [d for d in p.declarations if d.const]
    yield InputValuation(
        ints={d.name: 0 for d in consts if not d.is_array},
        arrays={d.name: [] for d in consts if d.is_array},
    )
    yield InputValuation(
        ints={d.name: 0 for d in consts if not d.is_array},
        arrays={d.name: [0] * bounds.max_len for d in consts if d.is_array},
    )


def _random_valuation(p: w.Program, bounds: SweepBounds, rng: random.Random) -> InputValuation:
    def value() -> int:
        return rng.randint(bounds.val_lo, bounds.val_hi)

    def sequence() -> list[int]:
        return [value() for _ in range(rng.randint(0, bounds.max_len))]

    inp = InputValuation()
    for d in p.declarations:
        target = (inp.arrays if d.is_array else inp.ints) if d.const else (
            inp.initial_arrays if d.is_array else inp.initial
        )
        target[d.name] = sequence() if d.is_array else value()
    return inp


def sample_inputs(
    p: w.Program, count: int, seed: int, bounds: SweepBounds | None = None
) -> list[InputValuation]:
    """
    Deterministic pseudo-random input valuations for p.

    The all-empty and all-zero valuations come first; the rest are distinct
    random valuations. Fewer than count are returned when the valuation
    space is smaller.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    bounds = bounds or SweepBounds()
    rng = random.Random(seed)
    seen: set[str] = set()
    result: list[InputValuation] = []

    def offer(inp: InputValuation) -> None:
        key = inp.model_dump_json()
        if key not in seen and len(result) < count:
            seen.add(key)
            result.append(inp)

    for inp in _boundary_valuations(p, bounds):
        offer(inp)
    attempts = 0
    while len(result) < count and attempts < count * 50:
        offer(_random_valuation(p, bounds, rng))
        attempts += 1
    return result
