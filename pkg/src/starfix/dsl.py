"""A small expression language for mappings on real vectors.

A mapping text defines one output component of F: (R^k)^n -> R^k (or of
g: R^k -> R^k with n = 1, or a scalar function with n = k = 1). Grammar:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := number | var | call | '-' factor | '(' expr ')'
    var    := 'x' digits ('[' digits ']')?
    call   := ('min'|'max'|'abs') '(' expr (',' expr)* ')'

Variables are 1-based: x2 is the second argument point, x2[3] its third
component. Numbers are decimal literals with optional fraction and exponent;
no hex, no underscores. min and max are binary, abs is unary; nest calls for
more arguments. A multi-component mapping joins its component expressions
with ';'.

Parsing and evaluation are pure. Asts are immutable and freely shared;
node positions are carried for error messages only and never participate
in equality, so format/parse round-trips compare structurally.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import StarfixError

__all__ = [
    "MappingAst",
    "ParseError",
    "EvalError",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse_mapping",
    "parse_expression",
    "eval_mapping",
    "eval_scalar",
    "format_mapping",
    "format_expression",
]

_CALL_ARITY = {"abs": 1, "min": 2, "max": 2}


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - text.rfind("\n", 0, offset)
    return line, col


class ParseError(StarfixError):
    """Rejected mapping text.

    kind is one of 'syntax', 'unknown_variable', 'arity', 'index_range';
    offset/line/col locate the problem inside the source text.
    """

    def __init__(self, kind: str, offset: int, message: str, source: str):
        self.kind = kind
        self.offset = offset
        self.line, self.col = _line_col(source, offset)
        super().__init__(f"{kind} at {self.line}:{self.col}: {message}")


class EvalError(StarfixError):
    """Evaluation failed; offset points at the offending operand."""

    def __init__(self, offset: int, message: str):
        self.offset = offset
        super().__init__(f"{message} (operand at offset {offset})")


# ---------------------------------------------------------------------------
# ast nodes; pos fields never participate in equality


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise ValueError("literals are finite and nonnegative; negate via Neg")
        object.__setattr__(self, "value", v + 0.0)


@dataclass(frozen=True)
class Var:
    slot: int
    comp: Union[int, None] = None
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    pos: int = field(default=0, compare=False)


Expr = Union[Num, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class MappingAst:
    """k component expressions over n argument points of dimension k."""

    n: int
    k: int
    components: tuple

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("arity and dimension must be at least 1")
        if len(self.components) != self.k:
            raise ValueError(
                f"expected {self.k} components, got {len(self.components)}"
            )


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(\.\d+)?([eE][+-]?\d+)?)
  | (?P<word>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/(),\[\]])
    """,
    re.VERBOSE,
)


def _tokenize(text: str, base: int, source: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(
                "syntax", base + i, f"unexpected character {text[i]!r}", source
            )
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), base + m.start()))
        i = m.end()
    tokens.append(("end", "", base + len(text)))
    return tokens


# ---------------------------------------------------------------------------
# recursive-descent parser

_VAR_RE = re.compile(r"^x(\d+)$")


class _Parser:
    def __init__(self, tokens, n: int, k: int, source: str):
        self.tokens = tokens
        self.i = 0
        self.n = n
        self.k = k
        self.source = source

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, kind: str, offset: int, message: str):
        raise ParseError(kind, offset, message, self.source)

    def expect_op(self, text: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != text:
            self.fail("syntax", pos, f"expected {text!r}")
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            self.fail("syntax", pos, f"unexpected trailing input {val!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term(), pos=pos)
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.factor(), pos=pos)
            else:
                return node

    def factor(self) -> Expr:
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(float(val), pos=pos)
        if kind == "op" and val == "-":
            return Neg(self.factor(), pos=pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "word":
            m = _VAR_RE.match(val)
            if m:
                return self.variable(int(m.group(1)), pos)
            if val in _CALL_ARITY:
                return self.call(val, pos)
            self.fail("syntax", pos, f"unknown identifier {val!r}")
        self.fail("syntax", pos, f"unexpected token {val!r}" if val else "unexpected end of input")

    def variable(self, slot: int, pos: int) -> Var:
        if not 1 <= slot <= self.n:
            self.fail(
                "unknown_variable", pos, f"variable x{slot} but arity is {self.n}"
            )
        kind, val, _ = self.peek()
        comp = None
        if kind == "op" and val == "[":
            self.advance()
            ckind, cval, cpos = self.advance()
            if ckind != "num" or not cval.isdigit():
                self.fail("syntax", cpos, "component index must be an integer")
            comp = int(cval)
            if not 1 <= comp <= self.k:
                self.fail(
                    "index_range", cpos, f"component {comp} but dimension is {self.k}"
                )
            self.expect_op("]")
        return Var(slot, comp, pos=pos)

    def call(self, fn: str, pos: int) -> Call:
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == ",":
                self.advance()
                args.append(self.expr())
            else:
                break
        self.expect_op(")")
        want = _CALL_ARITY[fn]
        if len(args) != want:
            self.fail("arity", pos, f"{fn} takes {want} argument(s), got {len(args)}")
        return Call(fn, tuple(args), pos=pos)


def parse_expression(text: str, n: int, k: int, _base: int = 0, _source=None) -> Expr:
    """Parse one component expression. Raises ParseError on rejection."""
    source = text if _source is None else _source
    if not text.strip():
        raise ParseError("syntax", _base, "empty expression", source)
    tokens = _tokenize(text, _base, source)
    return _Parser(tokens, n, k, source).parse()


def parse_mapping(text: str, n: int, k: int) -> MappingAst:
    """Parse a full mapping, one ';'-separated expression per component.

    k = 1 mappings are a single expression with no ';'. Raises ParseError;
    the error offset always points into `text`.
    """
    if n < 1 or k < 1:
        raise ValueError("arity and dimension must be at least 1")
    segments = []
    base = 0
    for seg in text.split(";"):
        segments.append((seg, base))
        base += len(seg) + 1
    if len(segments) != k:
        where = segments[k][1] - 1 if len(segments) > k else max(0, len(text) - 1)
        raise ParseError(
            "arity",
            where,
            f"mapping needs {k} component(s), got {len(segments)}",
            text,
        )
    components = tuple(
        parse_expression(seg, n, k, _base=off, _source=text) for seg, off in segments
    )
    return MappingAst(n, k, components)


# ---------------------------------------------------------------------------
# evaluation


def _eval(node: Expr, args: np.ndarray, j: int):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        comp = j if node.comp is None else node.comp - 1
        return args[..., node.slot - 1, comp]
    if isinstance(node, Neg):
        return -_eval(node.operand, args, j)
    if isinstance(node, BinOp):
        left = _eval(node.left, args, j)
        right = _eval(node.right, args, j)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if np.any(right == 0):
            raise EvalError(node.right.pos, "division by zero")
        return left / right
    fn = {"min": np.minimum, "max": np.maximum}.get(node.fn)
    if fn is not None:
        return fn(_eval(node.args[0], args, j), _eval(node.args[1], args, j))
    return np.abs(_eval(node.args[0], args, j))


def eval_mapping(ast: MappingAst, args) -> np.ndarray:
    """Evaluate at args of shape (n, k); leading batch axes broadcast.

    Component j of the result evaluates the j-th component expression; a
    bare variable x2 inside it reads x2[j], so componentwise mappings need
    no explicit indices at any dimension. Returns shape (k,), or (..., k)
    for batched args. Division by zero raises EvalError rather than
    producing an infinity.
    """
    args = np.asarray(args, dtype=np.float64)
    if args.shape[-2:] != (ast.n, ast.k):
        raise ValueError(
            f"arguments must have shape (..., {ast.n}, {ast.k}), got {args.shape}"
        )
    cols = [
        np.broadcast_to(_eval(c, args, j), args.shape[:-2])
        for j, c in enumerate(ast.components)
    ]
    return np.stack(cols, axis=-1)


def eval_scalar(ast: MappingAst, t) -> np.ndarray:
    """Evaluate an n=1, k=1 mapping at scalar t or a 1-d grid of ts."""
    if (ast.n, ast.k) != (1, 1):
        raise ValueError("scalar evaluation needs an n=1, k=1 mapping")
    t = np.asarray(t, dtype=np.float64)
    out = eval_mapping(ast, t.reshape(t.shape + (1, 1)))[..., 0]
    return out if t.ndim else np.float64(out)


# ---------------------------------------------------------------------------
# canonical formatting

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_UNARY, _LEVEL_ATOM = 1, 2, 3, 4
_OP_LEVEL = {"+": _LEVEL_ADD, "-": _LEVEL_ADD, "*": _LEVEL_MUL, "/": _LEVEL_MUL}
_OP_TEXT = {"+": " + ", "-": " - ", "*": "*", "/": "/"}


def _fmt(node: Expr, min_level: int) -> str:
    if isinstance(node, Num):
        text, level = repr(node.value), _LEVEL_ATOM
    elif isinstance(node, Var):
        suffix = "" if node.comp is None else f"[{node.comp}]"
        text, level = f"x{node.slot}{suffix}", _LEVEL_ATOM
    elif isinstance(node, Neg):
        text = "-" + _fmt(node.operand, _LEVEL_UNARY)
        level = _LEVEL_UNARY
    elif isinstance(node, BinOp):
        level = _OP_LEVEL[node.op]
        text = (
            _fmt(node.left, level)
            + _OP_TEXT[node.op]
            + _fmt(node.right, level + 1)
        )
    else:
        inner = ", ".join(_fmt(a, _LEVEL_ADD) for a in node.args)
        text, level = f"{node.fn}({inner})", _LEVEL_ATOM
    return f"({text})" if level < min_level else text


def format_expression(node: Expr) -> str:
    return _fmt(node, _LEVEL_ADD)


def format_mapping(ast: MappingAst) -> str:
    """Canonical text; reparsing it yields a structurally identical ast."""
    return "; ".join(format_expression(c) for c in ast.components)
