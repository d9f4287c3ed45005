"""A small temporal predicate language over EEH traces.

Grammar (``and`` binds tighter than ``or``, ``not`` tighter than both)::

    formula := disj
    disj    := conj ("or" conj)*
    conj    := unary ("and" unary)*
    unary   := "not" unary | "F" "(" formula ")" | "G" "(" formula ")"
             | "(" formula ")" | atom
    atom    := "entangled" "(" INT "," INT ")" | "hyper" | "somewhere_entangled"
             | "forbidden" | "class" "(" NAME ")"

Atoms are evaluated on a single layer; ``F`` and ``G`` range over the current
layer and all later ones. Evaluation starts at layer 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .ehg import CLASS_NAMES
from .eeh import EehTrace, Layer


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Entangled:
    i: int
    j: int


@dataclass(frozen=True)
class Hyper:
    pass


@dataclass(frozen=True)
class SomewhereEntangled:
    pass


@dataclass(frozen=True)
class ForbiddenAtom:
    pass


@dataclass(frozen=True)
class ClassIs:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Eventually:
    arg: "Formula"


@dataclass(frozen=True)
class Always:
    arg: "Formula"


Formula = Union[Entangled, Hyper, SomewhereEntangled, ForbiddenAtom, ClassIs, Not, And, Or, Eventually, Always]

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<punct>[(),]))")
_KEYWORDS = {"and", "or", "not", "F", "G", "entangled", "hyper", "somewhere_entangled", "forbidden", "class"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(("eof", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        kind, value, off = self.peek()
        found = "end of input" if kind == "eof" else repr(value)
        raise QuerySyntaxError(f"expected {expected}, found {found}", off)

    def expect(self, value: str) -> None:
        if self.peek()[1] != value or self.peek()[0] == "eof":
            self.fail(repr(value))
        self.advance()

    def at_word(self, word: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "ident" and value == word

    def formula(self) -> Formula:
        left = self.conj()
        while self.at_word("or"):
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at_word("and"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, value, _ = self.peek()
        if kind == "ident" and value == "not":
            self.advance()
            return Not(self.unary())
        if kind == "ident" and value in ("F", "G"):
            self.advance()
            self.expect("(")
            inner = self.formula()
            self.expect(")")
            return Eventually(inner) if value == "F" else Always(inner)
        if kind == "punct" and value == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def qubit(self) -> int:
        kind, value, off = self.peek()
        if kind != "int" or value not in ("1", "2", "3"):
            self.fail("qubit index 1, 2 or 3")
        self.advance()
        return int(value)

    def atom(self) -> Formula:
        kind, value, off = self.peek()
        if kind != "ident" or value not in _KEYWORDS - {"and", "or", "not", "F", "G"}:
            self.fail("a formula")
        self.advance()
        if value == "hyper":
            return Hyper()
        if value == "somewhere_entangled":
            return SomewhereEntangled()
        if value == "forbidden":
            return ForbiddenAtom()
        if value == "entangled":
            self.expect("(")
            i = self.qubit()
            self.expect(",")
            _, _, joff = self.peek()
            j = self.qubit()
            if i == j:
                raise QuerySyntaxError("entangled() needs two different qubits", joff)
            self.expect(")")
            return Entangled(i, j)
        # class(NAME)
        self.expect("(")
        kind, name, _ = self.peek()
        if kind != "ident" or name not in CLASS_NAMES:
            self.fail("a class name (" + ", ".join(CLASS_NAMES) + ")")
        self.advance()
        self.expect(")")
        return ClassIs(name)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.fail("'and', 'or' or end of input")
    return f


_PREC = {Or: 1, And: 2, Not: 3}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4)


def _wrap(f: Formula, need: int) -> str:
    s = to_text(f)
    return f"({s})" if _prec(f) < need else s


def to_text(f: Formula) -> str:
    """Print a formula; ``parse(to_text(f)) == f``."""
    if isinstance(f, Entangled):
        return f"entangled({f.i},{f.j})"
    if isinstance(f, Hyper):
        return "hyper"
    if isinstance(f, SomewhereEntangled):
        return "somewhere_entangled"
    if isinstance(f, ForbiddenAtom):
        return "forbidden"
    if isinstance(f, ClassIs):
        return f"class({f.name})"
    if isinstance(f, Not):
        return "not " + _wrap(f.arg, 3)
    if isinstance(f, And):
        return f"{_wrap(f.left, 2)} and {_wrap(f.right, 3)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, 1)} or {_wrap(f.right, 2)}"
    if isinstance(f, Eventually):
        return f"F({to_text(f.arg)})"
    if isinstance(f, Always):
        return f"G({to_text(f.arg)})"
    raise TypeError(f"not a formula: {f!r}")


def _atom(f: Formula, layer: Layer) -> bool:
    g = layer.hypergraph
    if isinstance(f, Entangled):
        return tuple(sorted((f.i, f.j))) in g.edges
    if isinstance(f, Hyper):
        return g.has_hyperedge
    if isinstance(f, SomewhereEntangled):
        return bool(g.edges)
    if isinstance(f, ForbiddenAtom):
        return layer.label.kind == "Forbidden"
    if isinstance(f, ClassIs):
        return layer.label.kind == f.name
    raise TypeError(f"not an atom: {f!r}")


def truth_table(f: Formula, trace: EehTrace) -> list[bool]:
    """Truth value of ``f`` evaluated from each layer index."""
    n = len(trace.layers)
    if isinstance(f, Not):
        return [not v for v in truth_table(f.arg, trace)]
    if isinstance(f, (And, Or)):
        a, b = truth_table(f.left, trace), truth_table(f.right, trace)
        op = (lambda x, y: x and y) if isinstance(f, And) else (lambda x, y: x or y)
        return [op(x, y) for x, y in zip(a, b)]
    if isinstance(f, (Eventually, Always)):
        inner = truth_table(f.arg, trace)
        out = [False] * n
        acc = isinstance(f, Always)
        for k in range(n - 1, -1, -1):
            acc = (acc and inner[k]) if isinstance(f, Always) else (acc or inner[k])
            out[k] = acc
        return out
    return [_atom(f, layer) for layer in trace.layers]


def evaluate(f: Formula, trace: EehTrace) -> bool:
    return truth_table(f, trace)[0]


def witness(f: Formula, trace: EehTrace) -> Optional[int]:
    """First layer witnessing a top-level F, or first layer violating a top-level G."""
    if isinstance(f, Eventually):
        inner = truth_table(f.arg, trace)
        return next((k for k, v in enumerate(inner) if v), None)
    if isinstance(f, Always):
        inner = truth_table(f.arg, trace)
        return next((k for k, v in enumerate(inner) if not v), None)
    return None
