"""Exact expression parser for field-valued command line parameters.

Grammar, lowest precedence first::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := integer | root | '(' expr ')'
    root   := 'sqrt3' | 'sqrt5' | 'sqrt15' | 'r3' | 'r5' | 'r15'

so "1/(1+sqrt3)" is the exact field element (sqrt3 - 1) / 2, never a float.
The r-names are the tokens used by the canonical serialisation, making
str -> parse a round trip.
"""

from __future__ import annotations

from .algebra import QuarticScalar, SQRT15, SQRT3, SQRT5


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_ROOTS = {
    "sqrt3": SQRT3,
    "sqrt5": SQRT5,
    "sqrt15": SQRT15,
    "r3": SQRT3,
    "r5": SQRT5,
    "r15": SQRT15,
}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.items.append(("int", text[i:j], i))
                i = j
                continue
            if ch.isalpha():
                j = i
                while j < len(text) and (text[j].isalnum()):
                    j += 1
                self.items.append(("name", text[i:j], i))
                i = j
                continue
            if ch in "+-*/()":
                self.items.append(("op", ch, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.items.append(("end", "", len(text)))
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.items[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.items[self.pos]
        self.pos += 1
        return tok


def parse_param(text: str) -> QuarticScalar:
    """Parse an exact field element; raises ParseError with a position."""
    tokens = _Tokens(text)
    value = _expr(tokens)
    kind, literal, pos = tokens.peek()
    if kind != "end":
        raise ParseError(f"trailing input {literal!r}", pos)
    return value


def _expr(tokens: _Tokens) -> QuarticScalar:
    kind, literal, _ = tokens.peek()
    negate = False
    if kind == "op" and literal == "-":
        tokens.take()
        negate = True
    value = _term(tokens)
    if negate:
        value = -value
    while True:
        kind, literal, _ = tokens.peek()
        if kind == "op" and literal in "+-":
            tokens.take()
            rhs = _term(tokens)
            value = value + rhs if literal == "+" else value - rhs
        else:
            return value


def _term(tokens: _Tokens) -> QuarticScalar:
    value = _factor(tokens)
    while True:
        kind, literal, pos = tokens.peek()
        if kind == "op" and literal in "*/":
            tokens.take()
            rhs = _factor(tokens)
            if literal == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos)
                value = value / rhs
        else:
            return value


def _factor(tokens: _Tokens) -> QuarticScalar:
    kind, literal, pos = tokens.take()
    if kind == "int":
        return QuarticScalar(int(literal))
    if kind == "name":
        root = _ROOTS.get(literal)
        if root is None:
            raise ParseError(f"unknown name {literal!r}", pos)
        return root
    if kind == "op" and literal == "(":
        value = _expr(tokens)
        kind, literal, pos = tokens.take()
        if not (kind == "op" and literal == ")"):
            raise ParseError("expected closing parenthesis", pos)
        return value
    if kind == "op" and literal == "-":
        # allow a sign directly in front of a factor, e.g. "2 * -3"
        return -_factor(tokens)
    raise ParseError(
        f"expected a number, root or parenthesis, found {literal or 'end'!r}", pos
    )


def serialize(value: QuarticScalar) -> str:
    """Canonical serialisation; parse_param(serialize(x)) == x."""
    return str(value)
