"""
W frontend: parse_program and pretty_print.

The program text is parsed with a pyparsing grammar (C operator precedence,
``//`` comments). The trailing ``assert`` clause is an SMT-LIB term read with
``nested_expr`` and converted to a trace-logic formula over ``main_end``.
A validation pass afterwards enforces scoping, sorting and mutability.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

import pyparsing as pp

from . import syntax as w
from .errors import MutabilityError, ScopeError, SortError, SourceSyntaxError
from .logic import (
    TRUE,
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
    LengthConst,
    LocationApp,
    Not,
    Or,
    Sort,
    Term,
    Top,
    Var,
    VarApp,
)

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

MAIN_END = LocationApp("main_end")

_RESERVED_PATTERN = re.compile(r"^(l\d+|n\d+|it\d+|l_end|main_end|dense_.*|.*_length)$")
_RESERVED_NAMES = {
    "Reach", "zero", "suc", "pred", "leq", "Nat", "Int", "Time", "Bool",
    "true", "false", "and", "or", "not", "ite", "let", "forall", "exists",
    "distinct", "select", "store", "assert", "check-sat", "declare-fun",
    "define-fun", "declare-sort", "div", "mod", "abs",
}


def is_reserved(name: str) -> bool:
    """Names that would collide with generated trace-logic symbols."""
    return name in _RESERVED_NAMES or bool(_RESERVED_PATTERN.match(name))


# Grammar

LPAR, RPAR, LBRACE, RBRACE, LBRACK, RBRACK, SEMI = map(pp.Suppress, "(){}[];")
ASSIGN = pp.Suppress(~pp.Literal("==") + pp.Literal("="))

FUNC = pp.Suppress(pp.Keyword("func"))
MAIN = pp.Suppress(pp.Keyword("main"))
IF = pp.Suppress(pp.Keyword("if"))
ELSE = pp.Suppress(pp.Keyword("else"))
WHILE = pp.Suppress(pp.Keyword("while"))
SKIP = pp.Suppress(pp.Keyword("skip"))
ASSERT = pp.Suppress(pp.Keyword("assert"))
CONST = pp.Keyword("const")
INT = pp.Suppress(pp.Keyword("Int"))
LENGTH = pp.Suppress(pp.Literal(".") + pp.Keyword("length"))

KEYWORDS = frozenset(("func", "main", "if", "else", "while", "skip", "const", "Int", "assert"))

# statements take their line from the first token, so no leading lookahead here
identifier = (
    pp.Word(pp.alphas + "_", pp.alphanums + "_")
    .add_condition(lambda t: t[0] not in KEYWORDS)
    .set_name("identifier")
)
integer = pp.Regex(r"\d+").set_name("integer")
integer.set_parse_action(lambda t: w.IntConst(int(t[0])))

expr = pp.Forward().set_name("expression")

length_of = (identifier + LENGTH).set_parse_action(lambda t: w.LengthOf(t[0]))
arr_read = (identifier + LBRACK + expr + RBRACK).set_parse_action(
    lambda t: w.ArrRead(t[0], t[1])
)
var_read = identifier.copy().add_parse_action(lambda t: w.VarRead(t[0]))
operand = length_of | arr_read | integer | var_read

_ARITH = {"+", "-", "*"}
_CMP = {"<", "<=", ">", ">=", "==", "!="}
_LOGIC = {"&&": "and", "||": "or"}


def _make_binary(op: str, left: w.Expression, right: w.Expression) -> w.Expression:
    if op in _ARITH:
        return w.ArithOp(op, left, right)
    if op in _CMP:
        return w.CmpOp(op, left, right)
    return w.BoolOp(_LOGIC[op], (left, right))


def _fold_binary(t):
    seq = t[0]
    result = seq[0]
    for i in range(1, len(seq), 2):
        result = _make_binary(seq[i], result, seq[i + 1])
    return result


def _unary(t):
    op, arg = t[0][0], t[0][1]
    if op == "!":
        return w.BoolOp("not", (arg,))
    if isinstance(arg, w.IntConst):
        return w.IntConst(-arg.value)
    return w.ArithOp("-", w.IntConst(0), arg)


expr <<= pp.infix_notation(
    operand,
    [
        (pp.one_of("! -"), 1, pp.OpAssoc.RIGHT, _unary),
        (pp.Literal("*"), 2, pp.OpAssoc.LEFT, _fold_binary),
        (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _fold_binary),
        (pp.one_of("<= >= < >"), 2, pp.OpAssoc.LEFT, _fold_binary),
        (pp.one_of("== !="), 2, pp.OpAssoc.LEFT, _fold_binary),
        (pp.Literal("&&"), 2, pp.OpAssoc.LEFT, _fold_binary),
        (pp.Literal("||"), 2, pp.OpAssoc.LEFT, _fold_binary),
    ],
)

statement = pp.Forward().set_name("statement")
context = pp.Group(pp.OneOrMore(statement))


def _at(action):
    def wrapped(s, loc, t):
        return action(t, pp.lineno(loc, s))

    return wrapped


skip_stmt = (SKIP + SEMI).set_parse_action(_at(lambda t, line: w.Skip(line=line)))
arr_assign = (identifier + LBRACK + expr + RBRACK + ASSIGN + expr + SEMI).set_parse_action(
    _at(lambda t, line: w.ArrAssign(t[0], t[1], t[2], line=line))
)
int_assign = (identifier + ASSIGN + expr + SEMI).set_parse_action(
    _at(lambda t, line: w.IntAssign(t[0], t[1], line=line))
)
if_stmt = (
    IF + LPAR + expr + RPAR + LBRACE + context + RBRACE
    + pp.Optional(ELSE + LBRACE + context + RBRACE)
    + pp.Optional(SEMI)
).set_parse_action(
    _at(
        lambda t, line: w.IfThenElse(
            t[0], tuple(t[1]), tuple(t[2]) if len(t) > 2 else (), line=line
        )
    )
)
while_stmt = (
    WHILE + LPAR + expr + RPAR + LBRACE + context + RBRACE + pp.Optional(SEMI)
).set_parse_action(_at(lambda t, line: w.While(t[0], tuple(t[1]), line=line)))

statement <<= skip_stmt | if_stmt | while_stmt | arr_assign | int_assign


@dataclass(frozen=True)
class _Declaration:
    decl: w.VarDecl
    init: w.Expression | None


def _declaration(t, line):
    items = list(t)
    const = items[0] == "const"
    if const:
        items.pop(0)
    is_array = items[0] == "[]"
    if is_array:
        items.pop(0)
    kind = w.VarKind.ARRAY if is_array else w.VarKind.INT
    decl = w.VarDecl(items[0], kind, const=const, line=line)
    return _Declaration(decl, items[1] if len(items) > 1 else None)


array_mark = (pp.Literal("[") + pp.Literal("]")).set_parse_action(lambda: "[]")
declaration = (
    pp.Optional(CONST) + INT + pp.Optional(array_mark) + identifier
    + pp.Optional(ASSIGN + expr) + SEMI
).set_parse_action(_at(_declaration))

sexpr = pp.nested_expr() | pp.Word(pp.printables, exclude_chars="()")
assertion = (ASSERT + sexpr).set_parse_action(
    _at(lambda t, line: _RawAssertion(t.as_list()[0], line))
)

program = (
    FUNC + MAIN + LPAR + RPAR + LBRACE
    + pp.Group(pp.OneOrMore(declaration | statement))
    + RBRACE
    + pp.Optional(assertion)
)
program.ignore(pp.dbl_slash_comment)


@dataclass(frozen=True)
class _RawAssertion:
    sexpr: object
    line: int


# Entry points


def parse_program(source: str) -> w.Program:
    """
    Parse a W source file into a validated Program.

    Raises SourceSyntaxError, ScopeError, SortError or MutabilityError.
    """
    try:
        result = program.parse_string(source, parse_all=True)
    except pp.ParseBaseException as exc:
        raise SourceSyntaxError(str(exc.msg), line=exc.lineno, column=exc.col) from None

    items = list(result[0])
    raw = result[1] if len(result) > 1 else None
    prog = _Validator().build(items, raw)
    logger.debug(
        "parsed program: %d declarations, %d statements",
        len(prog.declarations),
        len(prog.statements()),
    )
    return prog


class _Validator:
    def __init__(self):
        self.decls: dict[str, w.VarDecl] = {}

    def build(self, items, raw: _RawAssertion | None) -> w.Program:
        body: list[w.Statement] = []
        for item in items:
            if isinstance(item, _Declaration):
                self._declare(item.decl)
                if item.init is not None:
                    body.append(w.IntAssign(item.decl.name, item.init, line=item.decl.line))
            else:
                body.append(item)
        if not body:
            raise SourceSyntaxError("main must contain at least one statement")
        self._check_context(body)
        self._check_lines(body)
        if raw is None:
            formula: Formula = TRUE
        else:
            formula = _AssertionReader(self.decls, raw.line).formula(raw.sexpr, {})
        return w.Program(tuple(self.decls.values()), tuple(body), formula)

    def _declare(self, decl: w.VarDecl) -> None:
        if is_reserved(decl.name):
            raise ScopeError(f"{decl.name!r} is a reserved name", line=decl.line)
        if decl.name in self.decls:
            raise ScopeError(f"{decl.name!r} is declared twice", line=decl.line)
        self.decls[decl.name] = decl

    def _lookup(self, name: str, line: int) -> w.VarDecl:
        try:
            return self.decls[name]
        except KeyError:
            raise ScopeError(f"undeclared variable {name!r}", line=line) from None

    def _check_context(self, ctx) -> None:
        for s in ctx:
            self._check_statement(s)

    def _check_statement(self, s: w.Statement) -> None:
        match s:
            case w.Skip():
                pass
            case w.IntAssign(target, e):
                decl = self._target(target, s.line)
                if decl.is_array:
                    raise SortError(f"cannot assign an integer to array {target!r}", line=s.line)
                self._expect(e, "int", s.line)
            case w.ArrAssign(target, index, value):
                decl = self._target(target, s.line)
                if not decl.is_array:
                    raise SortError(f"{target!r} is not an array", line=s.line)
                self._expect(index, "int", s.line)
                self._expect(value, "int", s.line)
            case w.IfThenElse(cond, then_ctx, else_ctx):
                self._expect(cond, "bool", s.line)
                self._check_context(then_ctx)
                self._check_context(else_ctx)
            case w.While(cond, body):
                self._expect(cond, "bool", s.line)
                self._check_context(body)

    def _target(self, name: str, line: int) -> w.VarDecl:
        decl = self._lookup(name, line)
        if decl.const:
            raise MutabilityError(f"assignment to const variable {name!r}", line=line)
        return decl

    def _expect(self, e: w.Expression, sort: str, line: int) -> None:
        actual = self._sort(e, line)
        if actual != sort:
            raise SortError(f"expected {sort} expression, found {actual}", line=line)

    def _sort(self, e: w.Expression, line: int) -> str:
        match e:
            case w.IntConst(value):
                if not INT64_MIN <= value <= INT64_MAX:
                    raise SourceSyntaxError(f"integer literal {value} out of range", line=line)
                return "int"
            case w.VarRead(name):
                if self._lookup(name, line).is_array:
                    raise SortError(f"array {name!r} used as integer", line=line)
                return "int"
            case w.ArrRead(name, index):
                if not self._lookup(name, line).is_array:
                    raise SortError(f"{name!r} is not an array", line=line)
                self._expect(index, "int", line)
                return "int"
            case w.LengthOf(name):
                if not self._lookup(name, line).is_array:
                    raise SortError(f"length of non-array {name!r}", line=line)
                return "int"
            case w.ArithOp(_, left, right) | w.CmpOp(_, left, right):
                self._expect(left, "int", line)
                self._expect(right, "int", line)
                return "int" if isinstance(e, w.ArithOp) else "bool"
            case w.BoolOp(_, args):
                for arg in args:
                    self._expect(arg, "bool", line)
                return "bool"
        raise SortError(f"unknown expression {e!r}", line=line)

    def _check_lines(self, body) -> None:
        seen: set[int] = set()
        for s in w.iter_statements(tuple(body)):
            if s.line in seen:
                raise SourceSyntaxError("one statement per line", line=s.line)
            seen.add(s.line)


class _AssertionReader:
    """Converts the assertion s-expression into a Formula over main_end."""

    _CMP = ("<", "<=", ">", ">=")
    _BOOL_HEADS = {"and", "or", "not", "=>", "forall", "exists", *_CMP}

    def __init__(self, decls: dict[str, w.VarDecl], line: int):
        self.decls = decls
        self.line = line

    def _sort_error(self, message: str) -> SortError:
        return SortError(message, line=self.line)

    def _is_boolean(self, sx) -> bool:
        if isinstance(sx, str):
            return sx in ("true", "false")
        if len(sx) == 1:
            return self._is_boolean(sx[0])
        head = sx[0] if sx and isinstance(sx[0], str) else None
        if head == "=":
            return len(sx) > 1 and self._is_boolean(sx[1])
        return head in self._BOOL_HEADS

    def formula(self, sx, scope: dict[str, Var]) -> Formula:
        if isinstance(sx, str):
            if sx == "true":
                return Top()
            if sx == "false":
                return Bottom()
            raise self._sort_error(f"expected a formula, found {sx!r}")
        if not sx:
            raise SourceSyntaxError("empty term in assertion", line=self.line)
        if len(sx) == 1:
            return self.formula(sx[0], scope)
        head, args = sx[0], sx[1:]
        match head:
            case "and":
                return And(tuple(self.formula(a, scope) for a in args))
            case "or":
                return Or(tuple(self.formula(a, scope) for a in args))
            case "not":
                self._arity(head, args, 1)
                return Not(self.formula(args[0], scope))
            case "=>":
                parts = [self.formula(a, scope) for a in args]
                result = parts[-1]
                for part in reversed(parts[:-1]):
                    result = Implies(part, result)
                return result
            case "=":
                self._arity(head, args, 2)
                if self._is_boolean(args[0]):
                    return Iff(self.formula(args[0], scope), self.formula(args[1], scope))
                return Eq(self.term(args[0], scope), self.term(args[1], scope))
            case "<" | "<=" | ">" | ">=":
                self._arity(head, args, 2)
                return IntCmp(head, self.term(args[0], scope), self.term(args[1], scope))
            case "forall" | "exists":
                self._arity(head, args, 2)
                binders = self._binders(args[0])
                inner = dict(scope) | {b.name: b for b in binders}
                body = self.formula(args[1], inner)
                return (Forall if head == "forall" else Exists)(binders, body)
        raise self._sort_error(f"expected a formula, found ({head} ...)")

    def _arity(self, head, args, n: int) -> None:
        if len(args) != n:
            raise self._sort_error(f"{head} expects {n} arguments, got {len(args)}")

    def _binders(self, sx) -> tuple[Var, ...]:
        if isinstance(sx, str) or not sx:
            raise SourceSyntaxError("malformed binder list", line=self.line)
        binders = []
        for b in sx:
            if isinstance(b, str) or len(b) != 2 or not all(isinstance(x, str) for x in b):
                raise SourceSyntaxError("malformed binder", line=self.line)
            name, sort = b
            if sort != "Int":
                raise self._sort_error(f"binder {name!r} must have sort Int")
            if name in self.decls:
                raise ScopeError(f"binder {name!r} shadows a program variable", line=self.line)
            if is_reserved(name):
                raise ScopeError(f"{name!r} is a reserved name", line=self.line)
            binders.append(Var(name, Sort.INT))
        return tuple(binders)

    def term(self, sx, scope: dict[str, Var]) -> Term:
        if isinstance(sx, str):
            if re.fullmatch(r"\d+", sx):
                value = int(sx)
                if value > INT64_MAX:
                    raise SourceSyntaxError(f"integer literal {value} out of range", line=self.line)
                return IntConst(value)
            if sx in scope:
                return scope[sx]
            return self._application(sx, [], scope)
        if not sx:
            raise SourceSyntaxError("empty term in assertion", line=self.line)
        head, args = sx[0], sx[1:]
        if not isinstance(head, str):
            if not args:
                return self.term(head, scope)
            raise SourceSyntaxError("application of a compound term", line=self.line)
        if head == "-" and len(args) == 1:
            arg = self.term(args[0], scope)
            return IntConst(-arg.value) if isinstance(arg, IntConst) else IntNeg(arg)
        if head in ("+", "-", "*"):
            if len(args) < 2:
                raise self._sort_error(f"{head} expects at least 2 arguments")
            result = self.term(args[0], scope)
            for a in args[1:]:
                result = IntOp(head, result, self.term(a, scope))
            return result
        if not args and head in scope:
            return scope[head]
        return self._application(head, args, scope)

    def _application(self, name: str, args, scope) -> Term:
        if name.endswith("_length") and name[: -len("_length")] in self.decls:
            array = name[: -len("_length")]
            if not self.decls[array].is_array or args:
                raise self._sort_error(f"{name} is a constant of an array")
            return LengthConst(array)
        if name in ("true", "false"):
            raise self._sort_error(f"{name} used as an integer")
        decl = self.decls.get(name)
        if decl is None:
            raise ScopeError(f"unknown symbol {name!r}", line=self.line)
        if not decl.const:
            if not args or args[0] != "main_end":
                raise self._sort_error(f"{name!r} must be read at main_end")
            args = args[1:]
            timepoint = MAIN_END
        else:
            timepoint = None
        expected = 1 if decl.is_array else 0
        if len(args) != expected:
            raise self._sort_error(f"wrong number of arguments for {name!r}")
        position = self.term(args[0], scope) if args else None
        return VarApp(name, timepoint, position)


# Printing


def pretty_print(p: w.Program) -> str:
    """Canonical W source for p; parse_program(pretty_print(p)) == p."""
    lines = ["func main() {"]
    for d in p.declarations:
        const = "const " if d.const else ""
        brackets = "[]" if d.is_array else ""
        lines.append(f" {const}Int{brackets} {d.name};")
    _print_context(p.body, 1, lines)
    lines.append("}")
    rendered = render_sexpr(p.assertion)
    if not rendered.startswith("("):
        rendered = f"({rendered})"
    lines.append(f"assert {rendered}")
    return "\n".join(lines)


def _print_context(ctx, depth: int, out: list[str]) -> None:
    pad = " " * depth
    for s in ctx:
        match s:
            case w.Skip():
                out.append(f"{pad}skip;")
            case w.IntAssign(target, e):
                out.append(f"{pad}{target} = {format_expression(e)};")
            case w.ArrAssign(target, index, value):
                out.append(
                    f"{pad}{target}[{format_expression(index)}] = {format_expression(value)};"
                )
            case w.IfThenElse(cond, then_ctx, else_ctx):
                out.append(f"{pad}if ({format_expression(cond)}) {{")
                _print_context(then_ctx, depth + 1, out)
                if else_ctx:
                    out.append(f"{pad}}} else {{")
                    _print_context(else_ctx, depth + 1, out)
                out.append(f"{pad}}}")
            case w.While(cond, body):
                out.append(f"{pad}while ({format_expression(cond)}) {{")
                _print_context(body, depth + 1, out)
                out.append(f"{pad}}}")


_BOOL_SYMBOLS = {"and": "&&", "or": "||"}


def format_expression(e: w.Expression, nested: bool = False) -> str:
    match e:
        case w.IntConst(value):
            return str(value)
        case w.VarRead(name):
            return name
        case w.ArrRead(name, index):
            return f"{name}[{format_expression(index)}]"
        case w.LengthOf(name):
            return f"{name}.length"
        case w.ArithOp(op, left, right) | w.CmpOp(op, left, right):
            text = f"{format_expression(left, True)} {op} {format_expression(right, True)}"
            return f"({text})" if nested else text
        case w.BoolOp("not", (arg,)):
            return f"!{format_expression(arg, True)}"
        case w.BoolOp(op, (left, right)):
            symbol = _BOOL_SYMBOLS[op]
            text = f"{format_expression(left, True)} {symbol} {format_expression(right, True)}"
            return f"({text})" if nested else text
    raise ValueError(f"cannot print expression {e!r}")


def render_sexpr(node: Formula | Term) -> str:
    """Surface SMT-LIB rendering of an assertion formula or term."""
    match node:
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Var(name, _):
            return name
        case IntConst(value):
            return str(value) if value >= 0 else f"(- {-value})"
        case IntNeg(arg):
            return f"(- {render_sexpr(arg)})"
        case IntOp(op, left, right) | IntCmp(op, left, right):
            return f"({op} {render_sexpr(left)} {render_sexpr(right)})"
        case LengthConst(array):
            return f"{array}_length"
        case LocationApp(symbol, ()):
            return symbol
        case VarApp(var, timepoint, position):
            args = [render_sexpr(x) for x in (timepoint, position) if x is not None]
            return f"({var} {' '.join(args)})" if args else var
        case Eq(left, right) | Iff(left, right):
            return f"(= {render_sexpr(left)} {render_sexpr(right)})"
        case Not(arg):
            return f"(not {render_sexpr(arg)})"
        case And(args) | Or(args):
            head = "and" if isinstance(node, And) else "or"
            return f"({' '.join([head, *(render_sexpr(a) for a in args)])})"
        case Implies(left, right):
            return f"(=> {render_sexpr(left)} {render_sexpr(right)})"
        case Forall(binders, body) | Exists(binders, body):
            head = "forall" if isinstance(node, Forall) else "exists"
            bound = " ".join(f"({b.name} {b.sort.value})" for b in binders)
            return f"({head} ({bound}) {render_sexpr(body)})"
    raise ValueError(f"cannot render {node!r}")
