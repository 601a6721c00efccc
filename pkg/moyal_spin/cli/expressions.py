#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Operator expressions such as ``pi*nu*2*I1z*I2z`` or ``E/2 + I1x``.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | primary
    primary := NUMBER | 'pi' | 'i' | PARAM | 'E' | '𝟙' | I<k><axis> | '(' expr ')'

``<axis>`` is one of x, y, z, a, alpha, b, beta, p, m. A product of two
operators is their matrix product; a bare scalar in operator context is
that scalar times the identity.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Union

from ..angular import HalfInt, twice
from ..exceptions import ExpressionError
from ..spin_ops import SpinOperator, cartesian_op, identity_op

__all__ = ["Token", "tokenize", "ExpressionParser", "parse_operator", "parse_scalar", "operator_from_spec"]

Value = Union[complex, SpinOperator]

_TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<spinop>I(?P<slot>\d+)(?P<axis>alpha|beta|x|y|z|a|b|p|m)(?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<identity>\U0001D7D9)
  | (?P<symbol>[-+*/()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int
    slot: int = 0
    axis: str = ""


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise ExpressionError(f"unexpected character {text[position]!r}", text, position)
        kind = match.lastgroup
        if kind != "space":
            if match.group("spinop"):
                tokens.append(Token("spinop", match.group(0), position, int(match.group("slot")), match.group("axis")))
            else:
                tokens.append(Token(kind, match.group(0), position))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class ExpressionParser:
    """Recursive-descent evaluator over a token list.

    Args:
        text: Expression source.
        n_spins: Number of spins operators act on.
        J: Spin number.
        parameters: Values for free identifiers such as ``omega`` or ``nu``.
    """

    CONSTANTS = {"pi": math.pi, "i": 1j}

    def __init__(self, text: str, n_spins: int, J: HalfInt = Fraction(1, 2), parameters: Optional[Mapping[str, float]] = None):
        self.text = text
        self.n_spins = n_spins
        self.spin_twice = twice(J)
        self.parameters = dict(parameters or {})
        self.tokens = tokenize(text)
        self.index = 0

    def error(self, message: str, token: Optional[Token] = None) -> ExpressionError:
        token = token or self.peek()
        return ExpressionError(message, self.text, token.position)

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def parse(self) -> Value:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        value = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return value

    def expr(self) -> Value:
        value = self.term()
        while self.peek().text in ("+", "-"):
            token = self.advance()
            right = self.term()
            value = self._combine(value, right, token)
        return value

    def term(self) -> Value:
        value = self.unary()
        while self.peek().text in ("*", "/"):
            token = self.advance()
            right = self.unary()
            if token.text == "*":
                value = value * right
            elif isinstance(right, SpinOperator):
                raise self.error("cannot divide by an operator", token)
            elif right == 0:
                raise self.error("division by zero", token)
            else:
                value = value / right
        return value

    def unary(self) -> Value:
        if self.peek().text == "-":
            self.advance()
            return -self.unary()
        if self.peek().text == "+":
            self.advance()
            return self.unary()
        return self.primary()

    def primary(self) -> Value:
        token = self.advance()
        if token.kind == "number":
            return complex(float(token.text))
        if token.kind == "identity" or (token.kind == "name" and token.text == "E"):
            return identity_op(self.n_spins, Fraction(self.spin_twice, 2))
        if token.kind == "spinop":
            return self._spin_operator(token)
        if token.kind == "name":
            if token.text in self.parameters:
                return complex(self.parameters[token.text])
            if token.text in self.CONSTANTS:
                return complex(self.CONSTANTS[token.text])
            raise self.error(f"unknown name {token.text!r}", token)
        if token.text == "(":
            value = self.expr()
            if self.peek().text != ")":
                raise self.error("expected ')'")
            self.advance()
            return value
        if token.kind == "end":
            raise self.error("unexpected end of expression", token)
        raise self.error(f"unexpected {token.text!r}", token)

    def _spin_operator(self, token: Token) -> SpinOperator:
        if not 1 <= token.slot <= self.n_spins:
            raise self.error(f"spin {token.slot} out of range 1..{self.n_spins}", token)
        try:
            return cartesian_op(self.n_spins, [(token.slot, token.axis)], Fraction(self.spin_twice, 2))
        except ValueError as e:
            raise self.error(str(e), token) from e

    def _combine(self, left: Value, right: Value, token: Token) -> Value:
        return left + right if token.text == "+" else left - right


def _as_operator(value: Value, n_spins: int, J: HalfInt) -> SpinOperator:
    if isinstance(value, SpinOperator):
        return value
    return value * identity_op(n_spins, J)


def parse_operator(
    text: str, n_spins: int, J: HalfInt = Fraction(1, 2), parameters: Optional[Mapping[str, float]] = None
) -> SpinOperator:
    """Evaluate ``text`` to an operator on ``n_spins`` spins.

    Raises:
        ExpressionError: With the offending position on any syntax or name error.
    """
    value = ExpressionParser(text, n_spins, J, parameters).parse()
    return _as_operator(value, n_spins, J)


def parse_scalar(text: Union[str, float, int], parameters: Optional[Mapping[str, float]] = None) -> float:
    """Evaluate a real scalar expression such as ``1/(2*nu)``."""
    if isinstance(text, (int, float)):
        return float(text)
    value = ExpressionParser(str(text), 1, Fraction(1, 2), parameters).parse()
    if isinstance(value, SpinOperator):
        raise ExpressionError("expected a number, found an operator", str(text), 0)
    if abs(value.imag) > 1e-15:
        raise ExpressionError("expected a real number", str(text), 0)
    return value.real


def operator_from_spec(
    spec: Union[str, Dict[str, Union[float, str]]],
    n_spins: int,
    J: HalfInt = Fraction(1, 2),
    parameters: Optional[Mapping[str, float]] = None,
) -> SpinOperator:
    """Operator from an expression string or a ``{term: coefficient}`` mapping."""
    if isinstance(spec, str):
        return parse_operator(spec, n_spins, J, parameters)
    total = 0 * identity_op(n_spins, J)
    for term, coefficient in spec.items():
        total = total + parse_scalar(coefficient, parameters) * parse_operator(term, n_spins, J, parameters)
    return total
