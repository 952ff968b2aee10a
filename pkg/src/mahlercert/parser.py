"""Expressions over Q(z): integers, z, + - * / ^ (integer exponent), parentheses
and bracketed matrices such as [[0,1],[1,-z]]."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import RatFun
from .errors import DivisionByZero, ExprSyntaxError, NonRectangularMatrix
from .linalg import mat_add, mat_mul, mat_scale, mat_sub


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str = "z"


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Paren:
    inner: object


@dataclass(frozen=True)
class Matrix:
    rows: tuple


ExprAst = Num | Var | Neg | BinOp | Pow | Paren | Matrix


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str):
    toks = []
    line, col_base = 1, 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col_base = i + 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        col = i - col_base + 1
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(_Tok("int", text[i:j], line, col))
            i = j
            continue
        if ch in "z+-*/^()[],":
            toks.append(_Tok("z" if ch == "z" else ch, ch, line, col))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", line, col, ("integer", "z", "(", "[", "-"))
    toks.append(_Tok("end", "", line, len(text) - col_base + 1))
    return toks


_OPERAND_START = ("integer", "z", "(", "[", "-")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {found}", t.line, t.column, tuple(expected))

    def expect(self, kind):
        if self.tok.kind != kind:
            self.fail((kind,))
        self.i += 1

    def parse(self):
        node = self.additive()
        if self.tok.kind != "end":
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return node

    def additive(self):
        node = self.multiplicative()
        while self.tok.kind in ("+", "-"):
            op = self.tok.kind
            self.i += 1
            node = BinOp(op, node, self.multiplicative())
        return node

    def multiplicative(self):
        node = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.tok.kind
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.kind == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind != "^":
            return base
        self.i += 1
        sign = 1
        if self.tok.kind == "-":
            sign = -1
            self.i += 1
        if self.tok.kind != "int":
            self.fail(("integer",))
        exp = sign * int(self.tok.text)
        self.i += 1
        if self.tok.kind == "^":
            self.fail(("+", "-", "*", "/", ")", "]", ",", "end of input"))
        return Pow(base, exp)

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Num(int(t.text))
        if t.kind == "z":
            self.i += 1
            return Var()
        if t.kind == "(":
            self.i += 1
            inner = self.additive()
            self.expect(")")
            return Paren(inner)
        if t.kind == "[":
            return self.matrix()
        self.fail(_OPERAND_START)

    def matrix(self):
        self.expect("[")
        rows = []
        while True:
            if self.tok.kind != "[":
                self.fail(("[",))
            self.i += 1
            row = [self.additive()]
            while self.tok.kind == ",":
                self.i += 1
                row.append(self.additive())
            self.expect("]")
            rows.append(tuple(row))
            if self.tok.kind == ",":
                self.i += 1
                continue
            if self.tok.kind == "]":
                self.i += 1
                return Matrix(tuple(rows))
            self.fail((",", "]"))


def parse_expr(text: str):
    return _Parser(text).parse()


def _is_matrix(v):
    return isinstance(v, tuple)


def eval_expr(ast):
    """Evaluate to a RatFun or a tuple-of-rows matrix of RatFun."""
    if isinstance(ast, Num):
        return RatFun.coerce(ast.value)
    if isinstance(ast, Var):
        return RatFun.z_power(1)
    if isinstance(ast, Paren):
        return eval_expr(ast.inner)
    if isinstance(ast, Neg):
        v = eval_expr(ast.operand)
        return mat_scale(-1, v) if _is_matrix(v) else -v
    if isinstance(ast, Pow):
        v = eval_expr(ast.base)
        if _is_matrix(v):
            raise NonRectangularMatrix("matrix powers are not supported")
        if ast.exponent < 0 and v.is_zero():
            raise DivisionByZero("negative power of zero")
        return v ** ast.exponent
    if isinstance(ast, Matrix):
        rows = tuple(tuple(eval_expr(e) for e in row) for row in ast.rows)
        if any(len(r) != len(rows[0]) for r in rows):
            raise NonRectangularMatrix("matrix rows have different lengths")
        if any(_is_matrix(e) for r in rows for e in r):
            raise NonRectangularMatrix("nested matrices are not supported")
        return rows
    if isinstance(ast, BinOp):
        a, b = eval_expr(ast.left), eval_expr(ast.right)
        ma, mb = _is_matrix(a), _is_matrix(b)
        if ast.op == "/":
            if mb:
                raise NonRectangularMatrix("division by a matrix")
            if b.is_zero():
                raise DivisionByZero("division by the zero rational function")
            return mat_scale(b.inverse(), a) if ma else a / b
        if ast.op == "*":
            if ma and mb:
                return mat_mul(a, b)
            if ma or mb:
                return mat_scale(b, a) if ma else mat_scale(a, b)
            return a * b
        if ma != mb:
            raise NonRectangularMatrix("cannot add a scalar and a matrix")
        if ast.op == "+":
            return mat_add(a, b) if ma else a + b
        return mat_sub(a, b) if ma else a - b
    raise TypeError(f"not an expression node: {ast!r}")


def evaluate(text: str):
    return eval_expr(parse_expr(text))


def to_text(ast) -> str:
    """Print an AST back to parseable text."""
    if isinstance(ast, Num):
        return str(ast.value)
    if isinstance(ast, Var):
        return "z"
    if isinstance(ast, Paren):
        return f"({to_text(ast.inner)})"
    if isinstance(ast, Neg):
        return f"-{to_text(ast.operand)}"
    if isinstance(ast, Pow):
        return f"{to_text(ast.base)}^{ast.exponent}"
    if isinstance(ast, BinOp):
        right = to_text(ast.right)
        # keep left associativity explicit for non-commutative right operands
        if isinstance(ast.right, BinOp):
            right = f"({right})"
        return f"{to_text(ast.left)}{ast.op}{right}"
    if isinstance(ast, Matrix):
        return "[" + ",".join("[" + ",".join(to_text(e) for e in r) + "]" for r in ast.rows) + "]"
    raise TypeError(f"not an expression node: {ast!r}")


def value_to_text(v) -> str:
    if _is_matrix(v):
        return "[" + ",".join("[" + ",".join(str(e) for e in r) + "]" for r in v) + "]"
    return str(v)
