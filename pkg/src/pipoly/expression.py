"""A small expression language for general P/Q/R forms in pi(x).

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | factor
    factor := atom ("^" integer)?
    atom   := number | "e" | "gamma" | "x" | "n" | "k" | "(" expr ")"
            | "pi" "(" expr ")" | "log" "(" expr ")"
            | "sum" "(" ident "," integer "," ("n" | integer) "," expr ")"

Example::

    >>> spec = parse_spec("pi(x)^2 - e*x/log(x)*pi(x/e)")
    >>> spec_degree(spec)
    2
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import mpmath

from .families import E, GAMMA
from .numerics import POWI_CAP, ExtFloat, ext_from_int, ext_from_real, ext_fsum
from .primes import PrimeCounter, default_counter

__all__ = [
    "SpecError",
    "SpecSyntaxError",
    "SpecEvalError",
    "GeneralSpec",
    "parse_spec",
    "eval_spec",
    "spec_degree",
    "render",
    "Num", "Const", "Var", "Neg", "BinOp", "Pow", "Call", "Sum",
]

MAX_TEXT = 64 * 1024
# parser recursion (parentheses, calls, unary minus) and final tree height
MAX_DEPTH = 100
MAX_TREE_HEIGHT = 400
# longest sum evaluated
MAX_SUM_TERMS = 10 ** 6


class SpecError(Exception):
    """Base class for DSL failures."""


class SpecSyntaxError(SpecError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        exp = f" (expected {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at line {line}, column {column}{exp}")


class SpecEvalError(SpecError):
    pass


# -- AST ------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str  # "e" | "gamma"


@dataclass(frozen=True)
class Var:
    name: str  # "x" | "n" | "k"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str  # "pi" | "log"
    arg: "Node"


@dataclass(frozen=True)
class Sum:
    var: str
    start: int
    stop: Union[int, str]  # an integer or "n"
    body: "Node"


Node = Union[Num, Const, Var, Neg, BinOp, Pow, Call, Sum]


@dataclass(frozen=True)
class GeneralSpec:
    ast: Node
    text: str = ""

    def __str__(self) -> str:
        return render(self.ast)


# -- lexer ----------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number, ident, op, end
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        else:
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


# -- parser ---------------------------------------------------------------------

_ATOM_START = frozenset({"number", "e", "gamma", "x", "n", "k", "(", "pi", "log", "sum", "-"})


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.depth = 0
        self.bound = 0  # number of enclosing sums

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, expected=()) -> SpecSyntaxError:
        t = self.tok
        return SpecSyntaxError(message, t.line, t.col, frozenset(expected))

    def _what(self) -> str:
        return "end of input" if self.tok.kind == "end" else f"{self.tok.text!r}"

    def expect(self, text: str) -> _Tok:
        if self.tok.kind != "op" or self.tok.text != text:
            raise self.fail(f"unexpected {self._what()}", {repr(text)})
        t = self.tok
        self.i += 1
        return t

    def integer(self) -> int:
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise self.fail(f"expected a non-negative integer literal, found {self._what()}",
                            {"integer"})
        self.i += 1
        return int(t.text)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.fail(f"unexpected {self._what()}", {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return node

    def _enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.fail(f"expression nested deeper than {MAX_DEPTH} levels")

    def expr(self) -> Node:
        self._enter()
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        self.depth -= 1
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.i += 1
            self._enter()
            node = Neg(self.unary())
            self.depth -= 1
            return node
        return self.factor()

    def factor(self) -> Node:
        node = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            t = self.tok
            if t.kind == "number" and not t.text.isdigit():
                raise self.fail("exponent must be a non-negative integer literal", {"integer"})
            k = self.integer()
            if k > POWI_CAP:
                raise SpecSyntaxError(f"exponent {k} exceeds {POWI_CAP}", t.line, t.col)
            node = Pow(node, k)
            if self.tok.kind == "op" and self.tok.text == "^":
                raise self.fail("'^' is non-associative; parenthesise the base")
        return node

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "number":
            self.i += 1
            v = float(t.text)
            if not math.isfinite(v):
                raise SpecSyntaxError(f"number {t.text} is out of range", t.line, t.col)
            return Num(v)
        if t.kind == "ident":
            name = t.text
            if name in ("e", "gamma"):
                self.i += 1
                return Const(name)
            if name in ("x", "n"):
                self.i += 1
                return Var(name)
            if name == "k":
                if not self.bound:
                    raise self.fail("bound variable k used outside a sum")
                self.i += 1
                return Var("k")
            if name in ("pi", "log"):
                self.i += 1
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name == "sum":
                return self.sum()
            raise self.fail(f"unknown identifier {name!r}", _ATOM_START - {"-"})
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        raise self.fail(f"unexpected {self._what()}", _ATOM_START - {"-"})

    def sum(self) -> Node:
        self.i += 1
        self.expect("(")
        t = self.tok
        if t.kind != "ident":
            raise self.fail("expected the summation variable", {"k"})
        if t.text != "k":
            raise self.fail(f"summation variable must be k, not {t.text!r}", {"k"})
        self.i += 1
        self.expect(",")
        start = self.integer()
        self.expect(",")
        if self.tok.kind == "ident" and self.tok.text == "n":
            self.i += 1
            stop: int | str = "n"
        else:
            stop = self.integer()
        self.expect(",")
        self.bound += 1
        body = self.expr()
        self.bound -= 1
        self.expect(")")
        return Sum("k", start, stop, body)


def parse_spec(text: str) -> GeneralSpec:
    """Parse DSL text; raises :class:`SpecSyntaxError` with position on failure."""
    if not isinstance(text, str):
        raise TypeError("spec text must be str")
    if len(text.encode("utf-8", "surrogatepass")) > MAX_TEXT:
        raise SpecSyntaxError(f"spec text longer than {MAX_TEXT} bytes", 1, 1)
    if not text.strip():
        raise SpecSyntaxError("empty spec", 1, 1, frozenset(_ATOM_START))
    ast = _Parser(text).parse()
    if _height(ast) > MAX_TREE_HEIGHT:
        raise SpecSyntaxError(f"expression tree deeper than {MAX_TREE_HEIGHT} levels", 1, 1)
    return GeneralSpec(ast, text)


def _children(node: Node) -> tuple:
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, Pow):
        return (node.base,)
    if isinstance(node, Call):
        return (node.arg,)
    if isinstance(node, Sum):
        return (node.body,)
    return ()


def _height(root: Node) -> int:
    best = 0
    stack = [(root, 1)]
    while stack:
        node, h = stack.pop()
        best = max(best, h)
        stack.extend((c, h + 1) for c in _children(node))
    return best


# -- rendering and structure ------------------------------------------------------

def render(node: Node) -> str:
    """Canonical, fully parenthesised text that reparses to the same tree."""
    if isinstance(node, GeneralSpec):
        node = node.ast
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Const, Var)):
        return node.name
    if isinstance(node, Neg):
        return f"-({render(node.operand)})"
    if isinstance(node, BinOp):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    if isinstance(node, Pow):
        return f"({render(node.base)})^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({render(node.arg)})"
    if isinstance(node, Sum):
        return f"sum({node.var}, {node.start}, {node.stop}, {render(node.body)})"
    raise TypeError(f"not a spec node: {node!r}")


def spec_degree(spec: "GeneralSpec | Node") -> int:
    """Structural degree in pi(.): max over additive branches of summed power counts."""
    node = spec.ast if isinstance(spec, GeneralSpec) else spec
    if isinstance(node, (Num, Const, Var)):
        return 0
    if isinstance(node, Neg):
        return spec_degree(node.operand)
    if isinstance(node, BinOp):
        a, b = spec_degree(node.left), spec_degree(node.right)
        if node.op in "+-":
            return max(a, b)
        if node.op == "*":
            return a + b
        return a - b
    if isinstance(node, Pow):
        return spec_degree(node.base) * node.exponent
    if isinstance(node, Call):
        return 1 if node.func == "pi" else 0
    if isinstance(node, Sum):
        return spec_degree(node.body)
    raise TypeError(f"not a spec node: {node!r}")


# -- evaluation -------------------------------------------------------------------

_CONST_EXT = {"e": ext_from_real(E), "gamma": ext_from_real(GAMMA)}


class _Evaluator:
    def __init__(self, x: float, n: int | None, counter: PrimeCounter):
        self.x = float(x)
        self.X = ext_from_real(self.x)
        self.n = n
        self.counter = counter

    def _stop(self, stop) -> int:
        if stop == "n":
            if self.n is None:
                raise SpecEvalError("spec uses n but no n was given")
            return self.n
        return stop

    def _range(self, node: "Sum") -> range:
        r = range(node.start, self._stop(node.stop) + 1)
        if len(r) > MAX_SUM_TERMS:
            raise SpecEvalError(f"sum has {len(r)} terms; the limit is {MAX_SUM_TERMS}")
        return r

    def pi_of(self, arg: Node, env: dict) -> int:
        v = float(self.ext(arg, env))
        if v <= 0:
            raise SpecEvalError(f"pi argument {v!r} is not positive")
        try:
            return self.counter(v, lambda: self.mp(arg, env))
        except ValueError as exc:
            raise SpecEvalError(str(exc)) from exc

    def ext(self, node: Node, env: dict) -> ExtFloat:
        if isinstance(node, Num):
            return ext_from_real(node.value)
        if isinstance(node, Const):
            return _CONST_EXT[node.name]
        if isinstance(node, Var):
            if node.name == "x":
                return self.X
            if node.name == "n":
                return ext_from_int(self._stop("n"))
            return ext_from_int(env["k"])
        if isinstance(node, Neg):
            return -self.ext(node.operand, env)
        if isinstance(node, BinOp):
            a = self.ext(node.left, env)
            b = self.ext(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b.is_zero():
                raise SpecEvalError("division by zero")
            return a / b
        if isinstance(node, Pow):
            return self.ext(node.base, env) ** node.exponent
        if isinstance(node, Call):
            if node.func == "pi":
                return ext_from_int(self.pi_of(node.arg, env))
            v = float(self.ext(node.arg, env))
            if v <= 0 or not math.isfinite(v):
                raise SpecEvalError(f"log of {v!r}")
            return ext_from_real(math.log(v))
        if isinstance(node, Sum):
            parts = []
            for k in self._range(node):
                parts.append(self.ext(node.body, {**env, "k": k}))
            return ext_fsum(parts)
        raise TypeError(f"not a spec node: {node!r}")

    def mp(self, node: Node, env: dict):
        """Same tree in mpmath, for pi arguments sitting on a rounding boundary."""
        if isinstance(node, Num):
            return mpmath.mpf(node.value)
        if isinstance(node, Const):
            return mpmath.e if node.name == "e" else mpmath.euler
        if isinstance(node, Var):
            if node.name == "x":
                return mpmath.mpf(self.x)
            return mpmath.mpf(self._stop("n") if node.name == "n" else env["k"])
        if isinstance(node, Neg):
            return -self.mp(node.operand, env)
        if isinstance(node, BinOp):
            a, b = self.mp(node.left, env), self.mp(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b == 0:
                raise SpecEvalError("division by zero")
            return a / b
        if isinstance(node, Pow):
            return self.mp(node.base, env) ** node.exponent
        if isinstance(node, Call):
            if node.func == "pi":
                return mpmath.mpf(self.pi_of(node.arg, env))
            v = self.mp(node.arg, env)
            if v <= 0:
                raise SpecEvalError(f"log of {v}")
            return mpmath.log(v)
        if isinstance(node, Sum):
            return mpmath.fsum(self.mp(node.body, {**env, "k": k})
                               for k in self._range(node))
        raise TypeError(f"not a spec node: {node!r}")


def eval_spec(spec: GeneralSpec, x: float, n: int | None = None,
              counter: PrimeCounter | None = None) -> ExtFloat:
    """Evaluate a parsed spec at x with exact pi (floor semantics) and ExtFloat arithmetic."""
    if not math.isfinite(float(x)):
        raise SpecEvalError(f"x must be finite, got {x!r}")
    ev = _Evaluator(x, None if n is None else int(n), counter or default_counter())
    return ev.ext(spec.ast, {})
