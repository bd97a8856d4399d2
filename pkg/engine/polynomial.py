"""
Sparse multivariate polynomials over an exact field.

A polynomial in x1..xn is a dictionary from exponent tuples to nonzero
coefficients, e.g. 3*x1^2*x2 - 1/2*x3 in three variables is

    {(2, 1, 0): 3, (0, 0, 1): -1/2}
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from engine.errors import DimensionMismatch, MixedFields, PolynomialParseError
from engine.exactfield import FieldDescriptor, FieldElement

Exponent = Tuple[int, ...]


class MPolynomial:
    def __init__(self, field: FieldDescriptor, num_variables: int, terms: Optional[Dict[Exponent, Any]] = None):
        self.field = field
        self.num_variables = num_variables
        self.terms: Dict[Exponent, FieldElement] = {}
        for exponent, coefficient in (terms or {}).items():
            if len(exponent) != num_variables:
                raise DimensionMismatch(f"exponent {exponent} in a {num_variables}-variable polynomial")
            c = field.element(coefficient)
            if not c.is_zero():
                self.terms[tuple(exponent)] = c

    @classmethod
    def zero(cls, field: FieldDescriptor, num_variables: int) -> "MPolynomial":
        return cls(field, num_variables)

    @classmethod
    def constant(cls, field: FieldDescriptor, num_variables: int, value: Any) -> "MPolynomial":
        return cls(field, num_variables, {(0,) * num_variables: value})

    @classmethod
    def variable(cls, field: FieldDescriptor, num_variables: int, index: int) -> "MPolynomial":
        """x_index for 1 <= index <= num_variables"""
        if not 1 <= index <= num_variables:
            raise DimensionMismatch(f"x{index} outside x1..x{num_variables}")
        exponent = [0] * num_variables
        exponent[index - 1] = 1
        return cls(field, num_variables, {tuple(exponent): 1})

    @classmethod
    def variables(cls, field: FieldDescriptor, num_variables: int) -> List["MPolynomial"]:
        return [cls.variable(field, num_variables, i) for i in range(1, num_variables + 1)]

    def _coerce(self, other: Any) -> "MPolynomial":
        if isinstance(other, MPolynomial):
            if other.field != self.field:
                raise MixedFields(f"cannot combine polynomials over {self.field} and {other.field}")
            if other.num_variables != self.num_variables:
                raise DimensionMismatch("polynomials in different numbers of variables")
            return other
        return MPolynomial.constant(self.field, self.num_variables, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return MPolynomial(self.field, self.num_variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPolynomial(self.field, self.num_variables, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms: Dict[Exponent, FieldElement] = {}
        for k0, v0 in self.terms.items():
            for k1, v1 in other.terms.items():
                exponent = tuple(a + b for a, b in zip(k0, k1))
                terms[exponent] = terms[exponent] + v0 * v1 if exponent in terms else v0 * v1
        return MPolynomial(self.field, self.num_variables, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        acc = MPolynomial.constant(self.field, self.num_variables, 1)
        for b in bin(exponent)[2:]:
            acc = acc * acc
            if b == "1":
                acc = acc * self
        return acc

    def __eq__(self, other):
        if not isinstance(other, MPolynomial):
            return NotImplemented
        return self.field == other.field and self.num_variables == other.num_variables and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(k) for k in self.terms)

    def evaluate(self, point: Sequence[Any]) -> FieldElement:
        if len(point) != self.num_variables:
            raise DimensionMismatch(f"{len(point)} values for {self.num_variables} variables")
        point = [self.field.element(x) for x in point]
        acc = self.field.zero()
        for k, v in self.terms.items():
            prod = v
            for x, e in zip(point, k):
                prod = prod * x ** e
            acc = acc + prod
        return acc

    def evaluate_matrices(self, matrices: Sequence[Any], unit: Any) -> Any:
        """
        Substitute matrices for the variables: constants become c * unit, factors
        multiply left to right in variable order.
        """
        if len(matrices) != self.num_variables:
            raise DimensionMismatch(f"{len(matrices)} matrices for {self.num_variables} variables")
        acc = unit * self.field.zero()
        for k, v in self.terms.items():
            prod = unit * v
            for M, e in zip(matrices, k):
                for _ in range(e):
                    prod = prod @ M
            acc = acc + prod
        return acc

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e))):
            coefficient = self.terms[k]
            factors = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(k) if e]
            text = str(coefficient)
            if " " in text:
                text = f"({text})"
            if factors and coefficient.is_one():
                pieces.append("*".join(factors))
            else:
                pieces.append("*".join([text] + factors))
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"MPolynomial<{self} over {self.field}>"


def monomials_up_to_degree(field: FieldDescriptor, num_variables: int, degree: int) -> List[MPolynomial]:
    """All monic monomials of total degree <= degree, constant first."""
    monomials = []
    for total in range(degree + 1):
        for exponent in itertools.product(range(total + 1), repeat=num_variables):
            if sum(exponent) == total:
                monomials.append(MPolynomial(field, num_variables, {exponent: 1}))
    return monomials


# --- parsing ---

_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(\S))")


def _tokenize(text: str) -> List[Tuple[str, Any, int]]:
    tokens = []
    position = 0
    text = text.rstrip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            break
        number, var, symbol = match.groups()
        start = match.end() - len(match.group(0).lstrip())
        if number is not None:
            tokens.append(("num", int(number), start))
        elif var is not None:
            tokens.append(("var", int(var), start))
        elif symbol in "+-*/^()":
            tokens.append((symbol, symbol, start))
        else:
            raise PolynomialParseError(f"unexpected character {symbol!r} at position {start}", {"position": start})
        position = match.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent: expr := term (+|- term)*, term := unary (*|/ unary)*, unary := -unary | power, power := atom (^ int)?"""

    def __init__(self, text: str, field: FieldDescriptor, num_variables: int):
        self.tokens = _tokenize(text)
        self.index = 0
        self.field = field
        self.n = num_variables

    def peek(self):
        return self.tokens[self.index]

    def take(self, kind=None):
        token = self.tokens[self.index]
        if kind is not None and token[0] != kind:
            raise PolynomialParseError(f"expected {kind!r} at position {token[2]}, found {token[1]!r}",
                                       {"position": token[2]})
        self.index += 1
        return token

    def parse(self) -> MPolynomial:
        result = self.expr()
        self.take("end")
        return result

    def expr(self) -> MPolynomial:
        result = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            right = self.term()
            result = result + right if op == "+" else result - right
        return result

    def term(self) -> MPolynomial:
        result = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, position = self.take()
            right = self.unary()
            if op == "*":
                result = result * right
                continue
            if right.degree() > 0 or right.is_zero():
                raise PolynomialParseError(f"division by a non-constant or zero at position {position}",
                                           {"position": position})
            result = result * right.terms[(0,) * self.n].inverse()
        return result

    def unary(self) -> MPolynomial:
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "+":
            self.take()
        return self.power()

    def power(self) -> MPolynomial:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            exponent = self.take("num")[1]
            return base ** exponent
        return base

    def atom(self) -> MPolynomial:
        kind, value, position = self.take()
        if kind == "num":
            return MPolynomial.constant(self.field, self.n, Fraction(value))
        if kind == "var":
            if not 1 <= value <= self.n:
                raise PolynomialParseError(f"x{value} at position {position} is outside x1..x{self.n}",
                                           {"position": position})
            return MPolynomial.variable(self.field, self.n, value)
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise PolynomialParseError(f"unexpected {value!r} at position {position}", {"position": position})


def parse_polynomial(text: str, field: FieldDescriptor, num_variables: int) -> MPolynomial:
    """Parse e.g. '3*x1^2*x2 - 1/2*x3' into a polynomial in x1..x{num_variables}."""
    if not isinstance(text, str) or not text.strip():
        raise PolynomialParseError("empty polynomial")
    return _Parser(text, field, num_variables).parse()
