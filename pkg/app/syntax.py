"""
Abstract syntax of W programs.

Statements carry their 1-based source line as location key. The ``line``
fields are excluded from equality so that a re-parsed program compares equal
to the original regardless of layout.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .logic import Formula


class VarKind(str, Enum):
    INT = "int"
    ARRAY = "array"


@dataclass(frozen=True, slots=True)
class VarDecl:
    name: str
    kind: VarKind
    const: bool = False
    line: int = field(default=0, compare=False)

    @property
    def is_array(self) -> bool:
        return self.kind is VarKind.ARRAY


# Expressions


@dataclass(frozen=True, slots=True)
class IntConst:
    value: int


@dataclass(frozen=True, slots=True)
class VarRead:
    name: str


@dataclass(frozen=True, slots=True)
class ArrRead:
    name: str
    index: Expression


@dataclass(frozen=True, slots=True)
class ArithOp:
    op: str  # + - *
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class CmpOp:
    op: str  # < <= > >= == !=
    left: Expression
    right: Expression


@dataclass(frozen=True, slots=True)
class BoolOp:
    op: str  # and or not
    args: tuple[Expression, ...]


@dataclass(frozen=True, slots=True)
class LengthOf:
    name: str


Expression = Union[IntConst, VarRead, ArrRead, ArithOp, CmpOp, BoolOp, LengthOf]

BOOL_EXPRESSIONS = (CmpOp, BoolOp)


# Statements


@dataclass(frozen=True, slots=True)
class Skip:
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class IntAssign:
    target: str
    expr: Expression
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class ArrAssign:
    target: str
    index: Expression
    value: Expression
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class IfThenElse:
    cond: Expression
    then_ctx: tuple[Statement, ...]
    else_ctx: tuple[Statement, ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class While:
    cond: Expression
    body: tuple[Statement, ...]
    line: int = field(default=0, compare=False)


Statement = Union[Skip, IntAssign, ArrAssign, IfThenElse, While]
Context = tuple[Statement, ...]


def iter_statements(ctx: Context) -> Iterator[Statement]:
    """All statements of a context in source order, descending into branches."""
    for s in ctx:
        yield s
        match s:
            case IfThenElse(_, then_ctx, else_ctx):
                yield from iter_statements(then_ctx)
                yield from iter_statements(else_ctx)
            case While(_, body):
                yield from iter_statements(body)


@dataclass(frozen=True)
class Program:
    declarations: tuple[VarDecl, ...]
    body: Context
    assertion: Formula

    @property
    def source_map(self) -> dict[int, Statement]:
        return {s.line: s for s in iter_statements(self.body)}

    def statements(self) -> list[Statement]:
        return list(iter_statements(self.body))

    def loops(self) -> list[While]:
        return [s for s in iter_statements(self.body) if isinstance(s, While)]

    def decl(self, name: str) -> VarDecl:
        for d in self.declarations:
            if d.name == name:
                return d
        raise KeyError(name)

    @property
    def mutable_vars(self) -> list[VarDecl]:
        return [d for d in self.declarations if not d.const]

    @property
    def arrays(self) -> list[VarDecl]:
        return [d for d in self.declarations if d.is_array]
