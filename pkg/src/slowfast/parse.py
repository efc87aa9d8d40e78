"""Polynomial expressions and JSON system files.

Expression grammar (standard precedence, ``^`` right-associative)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := atom ("^" exponent)?
    exponent := INT ("^" exponent)?
    atom     := INT | IDENT | "(" expr ")"

Division is only allowed by a nonzero constant, so ``x^2*y/2`` and
``1/2*x^2*y`` both denote the same polynomial.  Implicit multiplication and
decimal literals are rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Sequence

from .poly import EPS, Polynomial, WeightVector
from .system import SlowFastSystem


class SpecError(ValueError):
    """Invalid system file."""


class ParseError(SpecError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group()
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, text, line, col))
        for ch in text:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str, names: Sequence[str]):
        self.toks = _tokenize(src)
        self.i = 0
        self.names = tuple(names)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> Polynomial:
        if self.tok.kind == "end":
            self.error("empty expression")
        p = self.expr()
        if self.tok.kind != "end":
            if self.tok.kind in ("ident", "num") or self.tok.text == "(":
                self.error(f"unexpected {self.tok.text!r} "
                           "(implicit multiplication is not allowed)")
            self.error(f"unexpected {self.tok.text!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            q = self.unary()
            if op.text == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.error("division only by a nonzero constant", op)
                p = p / q.constant_term()
        return p

    def unary(self) -> Polynomial:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return base ** self.exponent()
        return base

    def exponent(self) -> int:
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.error("negative exponent")
        if t.kind != "num":
            self.error("exponent must be a nonnegative integer literal")
        if not t.text.isdigit():
            self.error("fractional exponent")
        self.advance()
        k = int(t.text)
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            k = k ** self.exponent()
        return k

    def atom(self) -> Polynomial:
        t = self.tok
        if t.kind == "num":
            if not t.text.isdigit():
                self.error("decimal literal in a polynomial; write a rational a/b")
            self.advance()
            return Polynomial.constant(self.names, int(t.text))
        if t.kind == "ident":
            if t.text != EPS and t.text not in self.names:
                self.error(f"unknown identifier {t.text}")
            self.advance()
            return Polynomial.var(self.names, t.text)
        if self.accept("("):
            p = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return p
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")


def parse_polynomial(src: str, names: Sequence[str]) -> Polynomial:
    """Parse ``src`` into a canonical :class:`Polynomial` over ``names`` and eps."""
    if not isinstance(src, str):
        raise ParseError(f"expression must be a string, got {type(src).__name__}")
    return _Parser(src, names).parse()


# ----------------------------------------------------------------------------------
# system files
# ----------------------------------------------------------------------------------

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


@dataclass
class SystemSpec:
    variable_names: list
    P_source: str
    Q_sources: list
    weights: list
    eps_values: list = field(default_factory=list)
    initial_conditions: list = field(default_factory=list)
    integration: dict = field(default_factory=dict)
    analysis_options: dict = field(default_factory=dict)
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.variable_names)

    def system(self) -> SlowFastSystem:
        names = tuple(self.variable_names)
        P = parse_polynomial(self.P_source, names)
        Q = [parse_polynomial(q, names) for q in self.Q_sources]
        return SlowFastSystem(names, P, Q)

    def weight_vector(self) -> WeightVector:
        return WeightVector(tuple(self.weights))


def _require(doc, key):
    if key not in doc:
        raise SpecError(f"missing field {key!r}")
    return doc[key]


def parse_system(text: str) -> SystemSpec:
    """Validate a JSON system document; the fast variable is moved to slot 0."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise SpecError("system file must be a JSON object")

    variables = _require(doc, "variables")
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise SpecError("'variables' must be a list of identifiers")
    if len(set(variables)) != len(variables):
        dup = next(v for v in variables if variables.count(v) > 1)
        raise SpecError(f"duplicate variable {dup}")
    for v in variables:
        if not _IDENT.match(v) or v == EPS:
            raise SpecError(f"invalid variable name {v!r}")
    if len(variables) < 2:
        raise SpecError("at least two variables are required")

    fast = _require(doc, "fast")
    if fast not in variables:
        raise SpecError(f"fast variable {fast!r} is not among the variables")
    P_src = _require(doc, "P")
    Q_map = _require(doc, "Q")
    if not isinstance(Q_map, dict):
        raise SpecError("'Q' must map slow variables to expressions")
    weights = _require(doc, "weights")
    if (not isinstance(weights, list)
            or not all(isinstance(w, int) and not isinstance(w, bool) for w in weights)):
        raise SpecError("'weights' must be a list of integers")
    if len(weights) != len(variables):
        raise SpecError("weight count mismatch: "
                        f"{len(weights)} weights for {len(variables)} variables")
    if any(w < 1 for w in weights):
        raise SpecError("weights must be positive")

    order = [variables.index(fast)] + [i for i, v in enumerate(variables) if v != fast]
    names = [variables[i] for i in order]
    slow = names[1:]
    if not Q_map:
        raise SpecError("empty Q: every slow variable needs an equation")
    for key in Q_map:
        if key not in slow:
            raise SpecError(f"Q has an equation for {key!r}, which is not a slow variable")
    missing = [v for v in slow if v not in Q_map]
    if missing:
        raise SpecError(f"missing slow equation for {missing[0]!r}")

    eps = doc.get("eps", [])
    if not isinstance(eps, list) or not all(
            isinstance(e, (int, float)) and not isinstance(e, bool) for e in eps):
        raise SpecError("'eps' must be a list of numbers")
    ics = doc.get("initial_conditions", [])
    if not isinstance(ics, list):
        raise SpecError("'initial_conditions' must be a list of points")
    for ic in ics:
        if not isinstance(ic, list) or len(ic) != len(variables):
            raise SpecError(f"initial condition {ic!r} must have {len(variables)} entries")
    integration = doc.get("integration", {})
    if not isinstance(integration, dict):
        raise SpecError("'integration' must be an object")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise SpecError("'options' must be an object")

    spec = SystemSpec(
        variable_names=names,
        P_source=P_src,
        Q_sources=[Q_map[v] for v in slow],
        weights=[weights[i] for i in order],
        eps_values=[float(e) for e in eps],
        initial_conditions=[[float(ic[i]) for i in order] for ic in ics],
        integration=dict(integration),
        analysis_options=dict(options),
        name=str(doc.get("name", "")),
    )
    spec.system()  # surfaces expression errors (unknown identifiers etc.) now
    return spec


def load_system(path) -> SystemSpec:
    with open(path) as fh:
        return parse_system(fh.read())
