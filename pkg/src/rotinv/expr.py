"""A small arithmetic expression language for scalar functions on R^m.

Grammar (whitespace insensitive)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := unary ('^' factor)?          # '^' is RIGHT-associative
    unary   := '-' unary | primary
    primary := number | variable | call | '(' expr ')'

Variables are ``x1 ... xm`` (1-based); ``t`` is the reserved profile
argument. Scalar functions: sin, cos, exp, sqrt, abs, log. The
whole-vector symbol ``x`` is valid only as the argument of ``norm(x)``
or ``dot(x, x)``.

Note the right-associative power: ``2^3^2`` is ``2^(3^2)`` = 512, not 64.
Under this grammar ``-2^2`` parses as ``(-2)^2`` = 4, because unary
minus binds before the power operator.

Domain errors (sqrt or log of a negative, division by zero, non-finite
results) are raised as exceptions carrying the byte offset of the
offending subexpression; they never propagate as NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .linalg import Vector

__all__ = [
    "Expression",
    "Literal",
    "Variable",
    "RadiusVar",
    "Negate",
    "BinaryOp",
    "Call",
    "EvalContext",
    "ExpressionError",
    "LexicalError",
    "ParseError",
    "UnknownFunctionError",
    "ArityError",
    "EvaluationError",
    "DomainError",
    "NonFiniteResultError",
    "UnboundVariableError",
    "parse",
    "evaluate",
    "unparse",
    "variable_indices",
    "references_radius",
    "references_point",
]

SCALAR_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "abs": abs,
    "log": math.log,
}
VECTOR_FUNCTIONS = ("norm", "dot")

_BINARY_OPS = ("+", "-", "*", "/", "^")


class ExpressionError(Exception):
    """Base for all expression-language errors; carries a byte offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class LexicalError(ExpressionError):
    pass


class ParseError(ExpressionError):
    pass


class UnknownFunctionError(ParseError):
    pass


class ArityError(ParseError):
    pass


class EvaluationError(ExpressionError):
    pass


class DomainError(EvaluationError):
    """sqrt/log of a negative, division by zero, or similar."""


class NonFiniteResultError(EvaluationError):
    pass


class UnboundVariableError(EvaluationError):
    pass


class Expression:
    """Base class for AST nodes. Nodes are immutable and freely shareable."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Literal(Expression):
    value: float
    pos: int = field(default=0, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0.0:
            # Negative constants are Negate(Literal(...)); this keeps
            # unparse/parse round trips structurally exact.
            raise ValueError("literals must be finite and nonnegative")


@dataclass(frozen=True, slots=True)
class Variable(Expression):
    """Coordinate variable x<index>, 1-based."""

    index: int
    pos: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("variable indices are 1-based")


@dataclass(frozen=True, slots=True)
class RadiusVar(Expression):
    """The reserved profile argument t."""

    pos: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class Negate(Expression):
    operand: Expression
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class BinaryOp(Expression):
    op: str
    left: Expression
    right: Expression
    pos: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.op not in _BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True, slots=True)
class Call(Expression):
    """Function application. The vector functions norm/dot take the
    whole-vector symbol x implicitly, so their arg is None."""

    name: str
    arg: Expression | None
    pos: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.name in SCALAR_FUNCTIONS:
            if self.arg is None:
                raise ValueError(f"{self.name} takes one scalar argument")
        elif self.name in VECTOR_FUNCTIONS:
            if self.arg is not None:
                raise ValueError(f"{self.name} takes only the whole-vector symbol x")
        else:
            raise ValueError(f"unknown function {self.name!r}")


# --- lexer -----------------------------------------------------------------

_T_NUMBER = "number"
_T_IDENT = "ident"
_T_PUNCT = "punct"
_T_EOF = "end of input"

_PUNCT = set("+-*/^(),")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    value: float
    pos: int


def _tokenize(source: str) -> list[_Token]:
    is_ascii = source.isascii()

    def byte_offset(i: int) -> int:
        return i if is_ascii else len(source[:i].encode("utf-8"))

    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_T_PUNCT, ch, 0.0, byte_offset(i)))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            start = i
            while i < n and source[i].isdigit():
                i += 1
            if i < n and source[i] == ".":
                i += 1
                if i >= n or not source[i].isdigit():
                    raise LexicalError("expected a digit after the decimal point", byte_offset(i))
                while i < n and source[i].isdigit():
                    i += 1
            if i < n and source[i] in "eE":
                i += 1
                if i < n and source[i] in "+-":
                    i += 1
                if i >= n or not source[i].isdigit():
                    raise LexicalError("expected a digit in the exponent", byte_offset(i))
                while i < n and source[i].isdigit():
                    i += 1
            tokens.append(_Token(_T_NUMBER, source[start:i], float(source[start:i]), byte_offset(start)))
            continue
        if ch.isalpha() and ch.isascii():
            start = i
            while i < n and source[i].isalnum() and source[i].isascii():
                i += 1
            tokens.append(_Token(_T_IDENT, source[start:i], 0.0, byte_offset(start)))
            continue
        raise LexicalError(f"unexpected character {ch!r}", byte_offset(i))
    tokens.append(_Token(_T_EOF, "", 0.0, byte_offset(n)))
    return tokens


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_punct(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != _T_PUNCT or tok.text != text:
            got = tok.text or tok.kind
            raise ParseError(f"expected {text!r}, found {got!r}", tok.pos)
        return self.advance()

    def parse(self) -> Expression:
        e = self.expr()
        tok = self.peek()
        if tok.kind != _T_EOF:
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return e

    def expr(self) -> Expression:
        left = self.term()
        while self.peek().kind == _T_PUNCT and self.peek().text in "+-":
            op = self.advance()
            right = self.term()
            left = BinaryOp(op.text, left, right, pos=op.pos)
        return left

    def term(self) -> Expression:
        left = self.factor()
        while self.peek().kind == _T_PUNCT and self.peek().text in "*/":
            op = self.advance()
            right = self.factor()
            left = BinaryOp(op.text, left, right, pos=op.pos)
        return left

    def factor(self) -> Expression:
        base = self.unary()
        tok = self.peek()
        if tok.kind == _T_PUNCT and tok.text == "^":
            self.advance()
            exponent = self.factor()  # right-associative
            return BinaryOp("^", base, exponent, pos=tok.pos)
        return base

    def unary(self) -> Expression:
        tok = self.peek()
        if tok.kind == _T_PUNCT and tok.text == "-":
            self.advance()
            return Negate(self.unary(), pos=tok.pos)
        return self.primary()

    def primary(self) -> Expression:
        tok = self.advance()
        if tok.kind == _T_NUMBER:
            return Literal(tok.value, pos=tok.pos)
        if tok.kind == _T_PUNCT and tok.text == "(":
            inner = self.expr()
            self.expect_punct(")")
            return inner
        if tok.kind == _T_IDENT:
            return self.identifier(tok)
        got = tok.text or tok.kind
        raise ParseError(f"expected a number, variable, function call, or '(', found {got!r}", tok.pos)

    def identifier(self, tok: _Token) -> Expression:
        name = tok.text
        if name == "t":
            return RadiusVar(pos=tok.pos)
        if name == "x":
            raise ParseError("the whole-vector symbol x is only valid inside norm(x) or dot(x, x)", tok.pos)
        if name[0] == "x" and name[1:].isdigit():
            index = int(name[1:])
            if index < 1:
                raise ParseError("variable indices are 1-based: x1 is the first coordinate", tok.pos)
            return Variable(index, pos=tok.pos)
        if name in SCALAR_FUNCTIONS:
            self.expect_punct("(")
            if self._at_punct(")"):
                raise ArityError(f"{name} takes exactly one argument", self.peek().pos)
            arg = self.expr()
            if self._at_punct(","):
                raise ArityError(f"{name} takes exactly one argument", self.peek().pos)
            self.expect_punct(")")
            return Call(name, arg, pos=tok.pos)
        if name in VECTOR_FUNCTIONS:
            self.expect_punct("(")
            self._expect_vector_symbol(name)
            if name == "dot":
                self.expect_punct(",")
                self._expect_vector_symbol(name)
            self.expect_punct(")")
            return Call(name, None, pos=tok.pos)
        raise UnknownFunctionError(f"unknown function or variable {name!r}", tok.pos)

    def _at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == _T_PUNCT and tok.text == text

    def _expect_vector_symbol(self, fname: str) -> None:
        tok = self.peek()
        if tok.kind == _T_IDENT and tok.text == "x":
            self.advance()
            return
        raise ArityError(f"{fname} takes the whole-vector symbol x, found {tok.text or tok.kind!r}", tok.pos)


def parse(source: str) -> Expression:
    """Parse source text into an AST.

    Raises LexicalError, ParseError, UnknownFunctionError, or ArityError,
    each carrying the byte offset of the problem.
    """
    return _Parser(source).parse()


# --- evaluation ------------------------------------------------------------


class EvalContext:
    """Bindings for evaluation: either a point of R^m or a scalar radius t."""

    __slots__ = ("point", "radius")

    def __init__(self, point: Vector | None = None, radius: float | None = None):
        if (point is None) == (radius is None):
            raise ValueError("bind exactly one of point (coordinate mode) or radius (profile mode)")
        if radius is not None and not math.isfinite(radius):
            raise ValueError("radius binding must be finite")
        self.point = point
        self.radius = radius

    @classmethod
    def at_point(cls, point: Vector) -> "EvalContext":
        return cls(point=point)

    @classmethod
    def at_radius(cls, radius: float) -> "EvalContext":
        return cls(radius=radius)

    @property
    def m(self) -> int:
        if self.point is None:
            raise ValueError("profile-mode context has no dimension")
        return self.point.dim


def _check_finite(value: float, pos: int) -> float:
    if not math.isfinite(value):
        raise NonFiniteResultError("result is not finite", pos)
    return value


def evaluate(e: Expression, ctx: EvalContext) -> float:
    """Evaluate an AST at the context's binding. Deterministic: identical
    (expression, context) pairs give bitwise-identical results."""
    if isinstance(e, Literal):
        return e.value
    if isinstance(e, Variable):
        p = ctx.point
        if p is None:
            raise UnboundVariableError(f"x{e.index} is not bound in profile mode", e.pos)
        if e.index > p.dim:
            raise UnboundVariableError(f"x{e.index} is out of range for dimension {p.dim}", e.pos)
        return float(p.data[e.index - 1])
    if isinstance(e, RadiusVar):
        if ctx.radius is None:
            raise UnboundVariableError("t is only bound in profile mode", e.pos)
        return ctx.radius
    if isinstance(e, BinaryOp):
        left = evaluate(e.left, ctx)
        right = evaluate(e.right, ctx)
        op = e.op
        if op == "+":
            return _check_finite(left + right, e.pos)
        if op == "-":
            return _check_finite(left - right, e.pos)
        if op == "*":
            return _check_finite(left * right, e.pos)
        if op == "/":
            if right == 0.0:
                raise DomainError("division by zero", e.pos)
            return _check_finite(left / right, e.pos)
        try:
            return _check_finite(math.pow(left, right), e.pos)
        except ValueError:
            raise DomainError(f"{left!r} ^ {right!r} is undefined over the reals", e.pos) from None
        except OverflowError:
            raise NonFiniteResultError("power overflows", e.pos) from None
    if isinstance(e, Negate):
        return -evaluate(e.operand, ctx)
    if isinstance(e, Call):
        if e.arg is None:
            p = ctx.point
            if p is None:
                raise UnboundVariableError(f"{e.name}(x) is not available in profile mode", e.pos)
            sq = float(p.data @ p.data)
            return math.sqrt(sq) if e.name == "norm" else sq
        value = evaluate(e.arg, ctx)
        try:
            return _check_finite(SCALAR_FUNCTIONS[e.name](value), e.pos)
        except ValueError:
            raise DomainError(f"{e.name}({value!r}) is undefined", e.pos) from None
        except OverflowError:
            raise NonFiniteResultError(f"{e.name}({value!r}) overflows", e.pos) from None
    raise TypeError(f"not an expression node: {e!r}")


# --- unparse ---------------------------------------------------------------


def _render_literal(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def unparse(e: Expression) -> str:
    """Canonical fully parenthesized rendering; parse(unparse(e)) is
    structurally identical to e."""
    if isinstance(e, Literal):
        return _render_literal(e.value)
    if isinstance(e, Variable):
        return f"x{e.index}"
    if isinstance(e, RadiusVar):
        return "t"
    if isinstance(e, Negate):
        return f"(-{unparse(e.operand)})"
    if isinstance(e, BinaryOp):
        return f"({unparse(e.left)}{e.op}{unparse(e.right)})"
    if isinstance(e, Call):
        if e.arg is None:
            return "norm(x)" if e.name == "norm" else "dot(x,x)"
        return f"{e.name}({unparse(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def variable_indices(e: Expression) -> set[int]:
    """All coordinate indices referenced by the expression."""
    out: set[int] = set()
    _collect_indices(e, out)
    return out


def references_radius(e: Expression) -> bool:
    """True when the expression mentions the profile argument t."""
    if isinstance(e, RadiusVar):
        return True
    if isinstance(e, Negate):
        return references_radius(e.operand)
    if isinstance(e, BinaryOp):
        return references_radius(e.left) or references_radius(e.right)
    if isinstance(e, Call) and e.arg is not None:
        return references_radius(e.arg)
    return False


def references_point(e: Expression) -> bool:
    """True when the expression needs a point binding (coordinates, norm, dot)."""
    if isinstance(e, Variable):
        return True
    if isinstance(e, Negate):
        return references_point(e.operand)
    if isinstance(e, BinaryOp):
        return references_point(e.left) or references_point(e.right)
    if isinstance(e, Call):
        return True if e.arg is None else references_point(e.arg)
    return False


def _collect_indices(e: Expression, out: set[int]) -> None:
    if isinstance(e, Variable):
        out.add(e.index)
    elif isinstance(e, Negate):
        _collect_indices(e.operand, out)
    elif isinstance(e, BinaryOp):
        _collect_indices(e.left, out)
        _collect_indices(e.right, out)
    elif isinstance(e, Call) and e.arg is not None:
        _collect_indices(e.arg, out)
