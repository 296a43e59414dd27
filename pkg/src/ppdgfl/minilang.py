"""MiniLang: a small deterministic, integers-only imperative language.

Grammar (EBNF)::

    program  = [ "input" IDENT { "," IDENT } ";" ] { stmt } ;
    stmt     = IDENT "=" expr ";"
             | "if" "(" expr ")" block [ "else" block ]
             | "while" "(" expr ")" block
             | "print" "(" expr ")" ";" ;
    block    = "{" { stmt } "}" ;
    expr     = or ;
    or       = and { "||" and } ;
    and      = equality { "&&" equality } ;
    equality = relation { ( "==" | "!=" ) relation } ;
    relation = additive { ( "<" | "<=" | ">" | ">=" ) additive } ;
    additive = term { ( "+" | "-" ) term } ;
    term     = unary { ( "*" | "/" | "%" ) unary } ;
    unary    = ( "-" | "!" ) unary | primary ;
    primary  = INT | IDENT | "(" expr ")" ;

Line comments start with ``#``.  Every statement gets a dense pre-order id
starting at 1; those ids are the unit of fault localization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple, Optional, Union

ARITH_OPS = ("+", "-", "*", "/", "%")
REL_OPS = ("<", "<=", ">", ">=", "==", "!=")
LOGIC_OPS = ("&&", "||")

KEYWORDS = frozenset({"input", "if", "else", "while", "print"})


class MiniLangError(Exception):
    """Raised for any rejected program; carries a 1-based source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class ParseError(MiniLangError):
    pass


class UseBeforeAssignmentError(MiniLangError):
    pass


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class Num:
    value: int


@dataclass(frozen=True, eq=True)
class Var:
    name: str


@dataclass(frozen=True, eq=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, eq=True)
class UnOp:
    op: str
    operand: "Expr"


Expr = Union[Num, Var, BinOp, UnOp]


@dataclass(frozen=True, eq=True)
class Assign:
    id: int
    target: str
    expr: Expr


@dataclass(frozen=True, eq=True)
class If:
    id: int
    cond: Expr
    then: tuple
    orelse: tuple = ()


@dataclass(frozen=True, eq=True)
class While:
    id: int
    cond: Expr
    body: tuple


@dataclass(frozen=True, eq=True)
class Print:
    id: int
    expr: Expr


Stmt = Union[Assign, If, While, Print]
PREDICATES = (If, While)


@dataclass(frozen=True)
class Ast:
    inputs: tuple
    body: tuple
    name: str = field(default="program", compare=False)

    def statements(self) -> list:
        """All statements in pre-order, i.e. sorted by id."""
        return list(walk_statements(self.body))

    def statement(self, sid: int) -> Stmt:
        for stmt in walk_statements(self.body):
            if stmt.id == sid:
                return stmt
        raise KeyError(sid)

    def __len__(self) -> int:
        return sum(1 for _ in walk_statements(self.body))


@dataclass(frozen=True)
class SourceProgram:
    text: str
    name: str = "program"


def walk_statements(block) -> Iterator[Stmt]:
    for stmt in block:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_statements(stmt.then)
            yield from walk_statements(stmt.orelse)
        elif isinstance(stmt, While):
            yield from walk_statements(stmt.body)


def walk_expr(expr: Expr) -> Iterator[Expr]:
    """Expression nodes in source (left-to-right) order."""
    if isinstance(expr, BinOp):
        yield from walk_expr(expr.left)
        yield expr
        yield from walk_expr(expr.right)
    elif isinstance(expr, UnOp):
        yield expr
        yield from walk_expr(expr.operand)
    else:
        yield expr


def expr_vars(expr: Expr) -> set:
    return {e.name for e in walk_expr(expr) if isinstance(e, Var)}


def stmt_expr(stmt: Stmt) -> Expr:
    return stmt.cond if isinstance(stmt, PREDICATES) else stmt.expr


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------


class Token(NamedTuple):
    kind: str  # INT, IDENT, KW, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>&&|\|\||<=|>=|==|!=|[-+*/%<>=!(){};,])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "int":
            tokens.append(Token("INT", value, line, col))
        elif kind == "ident":
            tokens.append(Token("KW" if value in KEYWORDS else "IDENT", value, line, col))
        elif kind == "op":
            tokens.append(Token("OP", value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

_BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


class _Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0
        self.next_id = 1

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("OP", "KW") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.line, self.tok.col)
        return self.advance()

    def program(self):
        inputs = []
        if self.at("input"):
            self.advance()
            while True:
                tok = self.tok
                if tok.kind != "IDENT":
                    raise ParseError("expected input variable name", tok.line, tok.col)
                if tok.text in inputs:
                    raise ParseError(f"duplicate input declaration {tok.text!r}", tok.line, tok.col)
                inputs.append(tok.text)
                self.advance()
                if not self.at(","):
                    break
                self.advance()
            self.expect(";")
        body, positions = self.block_items(top=True)
        return tuple(inputs), body, positions

    def block_items(self, top: bool = False):
        stmts = []
        positions = {}
        while not (self.tok.kind == "EOF" if top else self.at("}")):
            if self.tok.kind == "EOF":
                raise ParseError("unterminated block", self.tok.line, self.tok.col)
            stmt, pos = self.statement()
            stmts.append(stmt)
            positions.update(pos)
        return tuple(stmts), positions

    def block(self):
        self.expect("{")
        stmts, positions = self.block_items()
        self.expect("}")
        return stmts, positions

    def statement(self):
        tok = self.tok
        sid = self.next_id
        self.next_id += 1
        positions = {sid: (tok.line, tok.col)}
        if tok.kind == "IDENT":
            self.advance()
            self.expect("=")
            expr = self.expr()
            self.expect(";")
            return Assign(sid, tok.text, expr), positions
        if self.at("print"):
            self.advance()
            self.expect("(")
            expr = self.expr()
            self.expect(")")
            self.expect(";")
            return Print(sid, expr), positions
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            body, inner = self.block()
            positions.update(inner)
            return While(sid, cond, body), positions
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then, inner = self.block()
            positions.update(inner)
            orelse = ()
            if self.at("else"):
                self.advance()
                orelse, inner = self.block()
                positions.update(inner)
            return If(sid, cond, then, orelse), positions
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}", tok.line, tok.col)

    def expr(self, level: int = 0) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "OP" and self.tok.text in ops:
            op = self.advance().text
            right = self.expr(level + 1)
            left = BinOp(op, left, right)
        return left

    def unary(self) -> Expr:
        if self.at("-") or self.at("!"):
            op = self.advance().text
            return UnOp(op, self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "INT":
            self.advance()
            return Num(int(tok.text))
        if tok.kind == "IDENT":
            self.advance()
            return Var(tok.text)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"expected expression, found {tok.text or 'end of input'!r}", tok.line, tok.col)


def parse(source: Union[SourceProgram, str], name: Optional[str] = None, inputs=()) -> Ast:
    """Parse MiniLang text into an :class:`Ast` and run the definite-assignment check.

    ``inputs`` names variables bound by the test case rather than by an
    ``input`` header.  They are appended after any header names, so the
    unparsed program declares them explicitly.
    """
    if isinstance(source, SourceProgram):
        text, name = source.text, name or source.name
    else:
        text = source
    parser = _Parser(tokenize(text))
    declared, body, positions = parser.program()
    extra = [v for v in dict.fromkeys(inputs) if v not in declared]
    ast = Ast(tuple(declared) + tuple(extra), body, name or "program")
    check_definite_assignment(ast, positions)
    return ast


def parse_file(path) -> Ast:
    from pathlib import Path

    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), name=path.stem)


# --------------------------------------------------------------------------
# Definite assignment
# --------------------------------------------------------------------------


def _assigned_after(block, assigned: frozenset, positions) -> frozenset:
    for stmt in block:
        missing = sorted(expr_vars(stmt_expr(stmt)) - assigned)
        if missing:
            line, col = positions.get(stmt.id, (0, 0))
            raise UseBeforeAssignmentError(
                f"statement {stmt.id} reads {missing[0]!r} before it is assigned on every path",
                line,
                col,
            )
        if isinstance(stmt, Assign):
            assigned = assigned | {stmt.target}
        elif isinstance(stmt, If):
            assigned = _assigned_after(stmt.then, assigned, positions) & _assigned_after(
                stmt.orelse, assigned, positions
            )
        elif isinstance(stmt, While):
            # The body may run zero times, so nothing it assigns is definite afterwards.
            _assigned_after(stmt.body, assigned, positions)
    return assigned


def check_definite_assignment(ast: Ast, positions=None) -> None:
    _assigned_after(ast.body, frozenset(ast.inputs), positions or {})


def definitely_assigned_before(ast: Ast) -> dict:
    """Map each statement id to the variables definitely assigned on entry to it."""
    result = {}

    def visit(block, assigned):
        for stmt in block:
            result[stmt.id] = assigned
            if isinstance(stmt, Assign):
                assigned = assigned | {stmt.target}
            elif isinstance(stmt, If):
                assigned = visit(stmt.then, assigned) & visit(stmt.orelse, assigned)
            elif isinstance(stmt, While):
                visit(stmt.body, assigned)
        return assigned

    visit(ast.body, frozenset(ast.inputs))
    return result


# --------------------------------------------------------------------------
# Unparsing
# --------------------------------------------------------------------------


class SourceToken(NamedTuple):
    text: str
    stmt: Optional[int]
    origin: object  # the AST node that produced this token, or None for punctuation


def _expr_tokens(expr: Expr, sid: int, out: list) -> None:
    # Binary operands are always parenthesized when they are themselves binary,
    # so swapping an operator never changes the parenthesization.
    if isinstance(expr, Num):
        out.append(SourceToken(str(expr.value), sid, expr))
    elif isinstance(expr, Var):
        out.append(SourceToken(expr.name, sid, expr))
    elif isinstance(expr, UnOp):
        out.append(SourceToken(expr.op, sid, expr))
        _operand_tokens(expr.operand, sid, out)
    else:
        _operand_tokens(expr.left, sid, out)
        out.append(SourceToken(expr.op, sid, expr))
        _operand_tokens(expr.right, sid, out)


def _operand_tokens(expr: Expr, sid: int, out: list) -> None:
    if isinstance(expr, BinOp):
        out.append(SourceToken("(", sid, None))
        _expr_tokens(expr, sid, out)
        out.append(SourceToken(")", sid, None))
    else:
        _expr_tokens(expr, sid, out)


def _stmt_tokens(stmt: Stmt, out: list, depth: int, lines: list) -> None:
    sid = stmt.id
    start = len(out)

    def flush():
        lines.append((depth, out[start:]))

    if isinstance(stmt, Assign):
        out.append(SourceToken(stmt.target, sid, None))
        out.append(SourceToken("=", sid, None))
        _expr_tokens(stmt.expr, sid, out)
        out.append(SourceToken(";", sid, None))
        flush()
    elif isinstance(stmt, Print):
        out.extend(SourceToken(t, sid, None) for t in ("print", "("))
        _expr_tokens(stmt.expr, sid, out)
        out.extend(SourceToken(t, sid, None) for t in (")", ";"))
        flush()
    else:
        keyword = "while" if isinstance(stmt, While) else "if"
        out.extend(SourceToken(t, sid, None) for t in (keyword, "("))
        _expr_tokens(stmt.cond, sid, out)
        out.extend(SourceToken(t, sid, None) for t in (")", "{"))
        flush()
        inner = stmt.body if isinstance(stmt, While) else stmt.then
        for child in inner:
            _stmt_tokens(child, out, depth + 1, lines)
        if isinstance(stmt, If) and stmt.orelse:
            out.extend(SourceToken(t, None, None) for t in ("}", "else", "{"))
            lines.append((depth, out[-3:]))
            for child in stmt.orelse:
                _stmt_tokens(child, out, depth + 1, lines)
        out.append(SourceToken("}", None, None))
        lines.append((depth, out[-1:]))


def _layout(ast: Ast):
    out: list = []
    lines: list = []
    if ast.inputs:
        start = len(out)
        out.append(SourceToken("input", None, None))
        for i, name in enumerate(ast.inputs):
            if i:
                out.append(SourceToken(",", None, None))
            out.append(SourceToken(name, None, None))
        out.append(SourceToken(";", None, None))
        lines.append((0, out[start:]))
    for stmt in ast.body:
        _stmt_tokens(stmt, out, 0, lines)
    return out, lines


def source_tokens(ast: Ast) -> list:
    """The token stream :func:`unparse` renders, each tagged with its AST origin."""
    return _layout(ast)[0]


_NO_SPACE_AFTER = {"(", "!", "print"}
_NO_SPACE_BEFORE = {")", ";", ","}


def _join(tokens: list) -> str:
    parts = []
    prev = None
    for tok in tokens:
        if prev is not None:
            glue = " "
            if tok.text in _NO_SPACE_BEFORE or prev.text in _NO_SPACE_AFTER:
                glue = ""
            elif isinstance(prev.origin, UnOp):
                glue = ""
            parts.append(glue)
        parts.append(tok.text)
        prev = tok
    return "".join(parts)


def unparse(ast: Ast) -> SourceProgram:
    lines = [("    " * depth) + _join(toks) for depth, toks in _layout(ast)[1]]
    text = "\n".join(lines) + ("\n" if lines else "")
    return SourceProgram(text, ast.name)


# --------------------------------------------------------------------------
# Statement table
# --------------------------------------------------------------------------


class StatementInfo(NamedTuple):
    id: int
    kind: str  # assign, print, if, while
    used: frozenset
    defined: Optional[str]

    @property
    def is_predicate(self) -> bool:
        return self.kind in ("if", "while")


def stmt_kind(stmt: Stmt) -> str:
    return type(stmt).__name__.lower()


def list_statements(ast: Ast) -> list:
    return [
        StatementInfo(
            stmt.id,
            stmt_kind(stmt),
            frozenset(expr_vars(stmt_expr(stmt))),
            stmt.target if isinstance(stmt, Assign) else None,
        )
        for stmt in ast.statements()
    ]


def replace_node(ast: Ast, target: object, new: Expr) -> Ast:
    """Return a copy of ``ast`` with the expression object ``target`` (by identity) swapped for ``new``."""
    found = False

    def rexpr(e):
        nonlocal found
        if e is target:
            found = True
            return new
        if isinstance(e, BinOp):
            left, right = rexpr(e.left), rexpr(e.right)
            if left is e.left and right is e.right:
                return e
            return replace(e, left=left, right=right)
        if isinstance(e, UnOp):
            operand = rexpr(e.operand)
            return e if operand is e.operand else replace(e, operand=operand)
        return e

    def rblock(block):
        return tuple(rstmt(s) for s in block)

    def rstmt(s):
        if isinstance(s, (Assign, Print)):
            return replace(s, expr=rexpr(s.expr))
        if isinstance(s, While):
            return replace(s, cond=rexpr(s.cond), body=rblock(s.body))
        return replace(s, cond=rexpr(s.cond), then=rblock(s.then), orelse=rblock(s.orelse))

    result = Ast(ast.inputs, rblock(ast.body), ast.name)
    if not found:
        raise ValueError("target expression not found in AST")
    return result
