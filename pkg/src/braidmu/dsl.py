"""A small textual leg-notation language compiled to dense leg operations.

Grammar (EBNF):

    stmt := expr ("==" expr)?
    expr := term ("." term)*
    term := atom "^*"?
    atom := NAME "[" INT ("," INT)* "]" ("@over" | "@under")? | "(" expr ")"

Composition reads left = top, matching operator-product order: in "A.B" the
term B is applied first.  The reserved names "c" and "cinv" braid adjacent
legs; any other name resolves through the bindings.  Two-leg atoms on
non-adjacent legs are routed with the annotated route (default "over").

Statement files are UTF-8 with one statement per line, "#" comments, and a
header line "context: <space-id> ...".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor import (LegError, LegOperator, Space, adjoint, apply_distant,
                     compose, embed_adjacent, identity)

__all__ = [
    "ParseError", "Atom", "Adj", "Seq", "Statement", "parse", "format_expr",
    "evaluate", "StatementResult", "run_statements", "parse_statement_file",
]

RESERVED = ("c", "cinv")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class Atom:
    name: str
    legs: tuple[int, ...]
    route: str | None = None


@dataclass(frozen=True)
class Adj:
    inner: "Expr"


@dataclass(frozen=True)
class Seq:
    terms: tuple["Expr", ...]


Expr = Atom | Adj | Seq


@dataclass(frozen=True)
class Statement:
    lhs: Expr
    rhs: Expr | None
    text: str
    line: int


# ---------------------------------------------------------------------------
# tokenizer / parser


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], col))
            i = j
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], col))
            i = j
        elif text.startswith("^*", i):
            tokens.append(_Token("adjoint", "^*", col))
            i += 2
        elif text.startswith("==", i):
            tokens.append(_Token("equals", "==", col))
            i += 2
        elif ch == "@":
            j = i + 1
            while j < len(text) and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word not in ("@over", "@under"):
                raise ParseError(f"unknown route annotation {word!r}", line, col)
            tokens.append(_Token("route", word, col))
            i = j
        elif ch in "[],.()":
            tokens.append(_Token(ch, ch, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], line: int):
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind: str) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", self.line, tok.column)
        self.pos += 1
        return tok

    def parse_statement(self) -> tuple[Expr, Expr | None]:
        lhs = self.parse_expr()
        rhs = None
        if self.peek().kind == "equals":
            self.take("equals")
            rhs = self.parse_expr()
        self.take("end")
        return lhs, rhs

    def parse_expr(self) -> Expr:
        terms = [self.parse_term()]
        while self.peek().kind == ".":
            self.take(".")
            terms.append(self.parse_term())
        if len(terms) == 1:
            return terms[0]
        flat: list[Expr] = []
        for t in terms:
            flat.extend(t.terms if isinstance(t, Seq) else [t])
        return Seq(tuple(flat))

    def parse_term(self) -> Expr:
        atom = self.parse_atom()
        if self.peek().kind == "adjoint":
            self.take("adjoint")
            return Adj(atom)
        return atom

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "(":
            self.take("(")
            inner = self.parse_expr()
            self.take(")")
            return inner
        name = self.take("name").text
        self.take("[")
        legs = [int(self.take("int").text)]
        while self.peek().kind == ",":
            self.take(",")
            legs.append(int(self.take("int").text))
        self.take("]")
        route = None
        if self.peek().kind == "route":
            route = self.take("route").text[1:]
        return Atom(name, tuple(legs), route)


def parse(text: str, line: int = 1) -> Expr:
    """Parse one expression (no '==')."""
    parser = _Parser(_tokenize(text, line), line)
    expr = parser.parse_expr()
    parser.take("end")
    return expr


def format_expr(expr: Expr) -> str:
    """Canonical formatter; parse(format_expr(e)) round-trips the AST."""
    if isinstance(expr, Atom):
        legs = ",".join(str(i) for i in expr.legs)
        route = f"@{expr.route}" if expr.route else ""
        return f"{expr.name}[{legs}]{route}"
    if isinstance(expr, Adj):
        inner = format_expr(expr.inner)
        if isinstance(expr.inner, Atom):
            return f"{inner}^*"
        return f"({inner})^*"
    return ".".join(f"({format_expr(t)})" if isinstance(t, Seq) else format_expr(t)
                    for t in expr.terms)


# ---------------------------------------------------------------------------
# evaluation


def _atom_operator(atom: Atom, bindings: dict[str, LegOperator],
                   context: tuple[Space, ...], braiding) -> LegOperator:
    if atom.name in RESERVED:
        if len(atom.legs) != 2 or atom.legs[1] != atom.legs[0] + 1:
            raise LegError(f"{atom.name} braids adjacent legs only, got {atom.legs}")
        i = atom.legs[0]
        if not 1 <= i <= len(context) - 1:
            raise LegError(f"braiding legs {atom.legs} out of range")
        a, b = context[i - 1], context[i]
        if atom.name == "c":
            op = braiding.braid(a, b)
        else:
            op = braiding.braid_inverse(b, a)  # inverse of c_{B,A}, mapping A (x) B -> B (x) A
        return embed_adjacent(op, context, i)
    if atom.name not in bindings:
        raise LegError(f"unknown operator name {atom.name!r}")
    op = bindings[atom.name]
    k = len(op.domain)
    if len(atom.legs) != k:
        raise LegError(f"{atom.name} has {k} legs, atom lists {len(atom.legs)}")
    legs = atom.legs
    if any(not 1 <= i <= len(context) for i in legs):
        raise LegError(f"leg index out of range in {atom.name}{list(legs)}")
    contiguous = all(legs[j + 1] == legs[j] + 1 for j in range(k - 1))
    if contiguous:
        return embed_adjacent(op, context, legs[0])
    if k == 2 and legs[0] < legs[1]:
        return apply_distant(op, context, (legs[0], legs[1]), atom.route or "over", braiding)
    raise LegError(f"unsupported leg pattern {list(legs)} for {atom.name}")


def evaluate(expr: Expr, bindings: dict[str, LegOperator], context: Sequence[Space],
             braiding=None) -> LegOperator:
    """Evaluate an expression on the given leg context.

    Terms are applied right to left; the running context tracks space changes
    introduced by braiding atoms.
    """
    context = tuple(context)
    if isinstance(expr, Seq):
        current = identity(context)
        for term in reversed(expr.terms):
            step = evaluate(term, bindings, current.codomain, braiding)
            current = compose(step, current)
        return current
    if isinstance(expr, Adj):
        inner = evaluate(expr.inner, bindings, context, braiding)
        if inner.domain != inner.codomain:
            raise LegError("adjoint of a context-changing expression is not supported")
        return adjoint(inner)
    return _atom_operator(expr, bindings, context, braiding)


@dataclass(frozen=True)
class StatementResult:
    statement: Statement
    residual: float | None
    passed: bool


def parse_statement_file(text: str) -> tuple[list[str], list[Statement]]:
    """Returns the declared context ids and the parsed statements."""
    context_ids: list[str] | None = None
    statements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("context:"):
            context_ids = line[len("context:"):].split()
            continue
        if line.startswith("use:"):
            continue
        parser = _Parser(_tokenize(line, lineno), lineno)
        lhs, rhs = parser.parse_statement()
        statements.append(Statement(lhs, rhs, line, lineno))
    if context_ids is None:
        raise ParseError("missing 'context:' header", 1, 1)
    return context_ids, statements


def run_statements(text: str, bindings: dict[str, LegOperator],
                   spaces: dict[str, Space], braiding=None,
                   tol: float = 1e-9) -> list[StatementResult]:
    """Evaluate every '==' statement; bare expressions only check evaluability."""
    context_ids, statements = parse_statement_file(text)
    try:
        context = tuple(spaces[sid] for sid in context_ids)
    except KeyError as exc:
        raise ParseError(f"unknown space id {exc}", 1, 1) from None
    results = []
    for stmt in statements:
        lhs = evaluate(stmt.lhs, bindings, context, braiding)
        if stmt.rhs is None:
            results.append(StatementResult(stmt, None, True))
            continue
        rhs = evaluate(stmt.rhs, bindings, context, braiding)
        residual = float(np.linalg.norm(lhs.matrix - rhs.matrix))
        results.append(StatementResult(stmt, residual, residual < tol))
    return results
