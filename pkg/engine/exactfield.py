"""
Exact Field Arithmetic

Scalars for everything else in tdpkit: rationals (fractions.Fraction payloads),
prime fields GF(p) (residues in [0, p)) and quadratic extensions K(sqrt(delta))
stacked at most two steps high. Every value has a canonical payload, so equality
is structural and hashing is safe.

Scalar strings:
    "n", "n/m"                      rational
    "n mod p"                       prime field
    "u + v * sqrt(delta)"           quadratic extension (components parenthesized
                                    when they contain spaces)
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Any, Dict, Iterator, List, Optional, Tuple

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

from engine.errors import (
    DivisionByZero,
    EvenCharacteristic,
    ExtensionHeightExceeded,
    MixedFields,
    NotAnExtension,
    NotInBaseField,
    ScalarParseError,
)

RATIONAL = "rational"
PRIME = "prime"
QUADRATIC = "quadratic_ext"

MAX_TOWER_HEIGHT = 2


@dataclass(frozen=True)
class FieldDescriptor:
    """Which field a scalar lives in. Build through the factory functions below."""
    kind: str
    p: Optional[int] = None
    base: Optional["FieldDescriptor"] = None
    delta: Optional["FieldElement"] = None

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.p is not None or self.base is not None or self.delta is not None:
                raise ValueError("rational field takes no parameters")
        elif self.kind == PRIME:
            if not isinstance(self.p, int) or not isprime(self.p):
                raise ValueError(f"GF(p) needs a prime p, got {self.p!r}")
        elif self.kind == QUADRATIC:
            if self.base is None or self.delta is None:
                raise ValueError("quadratic extension needs a base field and delta")
            if self.delta.field != self.base:
                raise MixedFields("delta must live in the base field")
            if self.base.characteristic == 2:
                raise EvenCharacteristic("quadratic extensions in characteristic 2 are not supported")
            if self.base.height + 1 > MAX_TOWER_HEIGHT:
                raise ExtensionHeightExceeded(
                    f"extension towers are capped at height {MAX_TOWER_HEIGHT}",
                    {"base": str(self.base)},
                )
            if self.delta.is_zero() or self.delta.sqrt() is not None:
                raise ValueError(f"delta = {self.delta} is a square in {self.base}")
        else:
            raise ValueError(f"Unknown field kind: {self.kind}")

    # --- structure ---

    @property
    def characteristic(self) -> int:
        if self.kind == RATIONAL:
            return 0
        if self.kind == PRIME:
            return self.p
        return self.base.characteristic

    @property
    def height(self) -> int:
        return 0 if self.kind != QUADRATIC else self.base.height + 1

    @property
    def prime_field(self) -> "FieldDescriptor":
        return self if self.kind != QUADRATIC else self.base.prime_field

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def order(self) -> Optional[int]:
        if not self.is_finite:
            return None
        return self.characteristic ** (2 ** self.height)

    def tower(self) -> List["FieldDescriptor"]:
        """Fields from the prime field up to self, inclusive."""
        chain = [self]
        while chain[-1].kind == QUADRATIC:
            chain.append(chain[-1].base)
        return list(reversed(chain))

    def extends(self, other: "FieldDescriptor") -> bool:
        """True when `other` appears in this field's tower (including self)."""
        return other in self.tower()

    # --- element construction ---

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)

    def element(self, value: Any) -> "FieldElement":
        """Coerce int, Fraction, str or a base-field element into this field."""
        if isinstance(value, FieldElement):
            if value.field == self:
                return value
            return embed(value, self)
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError(f"Cannot build a field element from {type(value).__name__}")
        if self.kind == RATIONAL:
            return FieldElement(self, Fraction(value))
        if self.kind == PRIME:
            value = Fraction(value)
            num = value.numerator % self.p
            den = value.denominator % self.p
            if den == 0:
                raise DivisionByZero(f"{value} has no image in GF({self.p})")
            return FieldElement(self, num * pow(den, -1, self.p) % self.p)
        return FieldElement(self, (self.base.element(value), self.base.zero()))

    def sqrt_delta(self) -> "FieldElement":
        """The adjoined square root, 0 + 1*sqrt(delta)."""
        if self.kind != QUADRATIC:
            raise NotAnExtension(f"{self} is not a quadratic extension")
        return FieldElement(self, (self.base.zero(), self.base.one()))

    def elements(self) -> Iterator["FieldElement"]:
        """Every element of a finite field, in canonical order."""
        if self.kind == RATIONAL:
            raise ValueError("cannot enumerate an infinite field")
        if self.kind == PRIME:
            for r in range(self.p):
                yield FieldElement(self, r)
            return
        base_elements = list(self.base.elements())
        for u, v in itertools.product(base_elements, base_elements):
            yield FieldElement(self, (u, v))

    def random_element(self, rng: random.Random, bound: int = 5) -> "FieldElement":
        if self.kind == RATIONAL:
            return FieldElement(self, Fraction(rng.randint(-bound, bound), rng.randint(1, bound)))
        if self.kind == PRIME:
            return FieldElement(self, rng.randrange(self.p))
        return FieldElement(self, (self.base.random_element(rng, bound), self.base.random_element(rng, bound)))

    def random_nonzero(self, rng: random.Random, bound: int = 5) -> "FieldElement":
        while True:
            x = self.random_element(rng, bound)
            if not x.is_zero():
                return x

    # --- serialization ---

    def parse(self, text: str) -> "FieldElement":
        if not isinstance(text, str):
            raise ScalarParseError(f"scalar must be a string, got {type(text).__name__}")
        text = _strip_parens(text.strip())
        if not text:
            raise ScalarParseError("empty scalar")
        if self.kind == RATIONAL:
            try:
                return FieldElement(self, Fraction(text))
            except (ValueError, ZeroDivisionError):
                raise ScalarParseError(f"not a rational number: {text!r}")
        if self.kind == PRIME:
            match = _PRIME_LITERAL.match(text)
            if not match:
                raise ScalarParseError(f"not a GF({self.p}) literal: {text!r}")
            if match.group(3) is not None and int(match.group(3)) != self.p:
                raise ScalarParseError(f"modulus {match.group(3)} does not match GF({self.p})")
            num = int(match.group(1))
            den = int(match.group(2)) if match.group(2) else 1
            if den % self.p == 0:
                raise ScalarParseError(f"denominator vanishes in GF({self.p}): {text!r}")
            return self.element(Fraction(num, den))
        return self._parse_extension(text)

    def _parse_extension(self, text: str) -> "FieldElement":
        parts = _split_top_level(text, " + ")
        if len(parts) == 1:
            if _split_top_level(text, " * ")[-1].startswith("sqrt("):
                return FieldElement(self, (self.base.zero(), self._parse_sqrt_term(text)))
            return embed(self.base.parse(text), self)
        if len(parts) != 2:
            raise ScalarParseError(f"expected 'u + v * sqrt(delta)', got {text!r}")
        return FieldElement(self, (self.base.parse(parts[0]), self._parse_sqrt_term(parts[1])))

    def _parse_sqrt_term(self, text: str) -> "FieldElement":
        factors = _split_top_level(text, " * ")
        if len(factors) != 2 or not factors[1].startswith("sqrt(") or not factors[1].endswith(")"):
            raise ScalarParseError(f"expected 'v * sqrt(delta)', got {text!r}")
        if self.base.parse(factors[1][len("sqrt("):-1]) != self.delta:
            raise ScalarParseError(f"sqrt argument in {text!r} does not match delta = {self.delta}")
        return self.base.parse(factors[0])

    def to_json(self) -> Dict[str, Any]:
        if self.kind == RATIONAL:
            return {"kind": RATIONAL}
        if self.kind == PRIME:
            return {"kind": PRIME, "p": self.p}
        return {"kind": QUADRATIC, "base": self.base.to_json(), "delta": str(self.delta)}

    def __str__(self) -> str:
        if self.kind == RATIONAL:
            return "QQ"
        if self.kind == PRIME:
            return f"GF({self.p})"
        return f"{self.base}(sqrt({self.delta}))"

    def __repr__(self) -> str:
        return f"FieldDescriptor<{self}>"


_PRIME_LITERAL = re.compile(r"^(-?\d+)(?:/(\d+))?(?:\s*mod\s*(\d+))?$")


def _split_top_level(text: str, sep: str) -> List[str]:
    """Split on `sep` only outside parentheses."""
    parts, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i].strip())
            i += len(sep)
            start = i
            continue
        i += 1
    parts.append(text[start:].strip())
    return parts


def _strip_parens(text: str) -> str:
    """Remove one pair of parentheses that wraps the whole string."""
    while text.startswith("(") and text.endswith(")"):
        depth = 0
        for i, ch in enumerate(text):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(text) - 1:
                return text
        text = text[1:-1].strip()
    return text


class FieldElement:
    """
    An immutable exact scalar. Arithmetic between different fields raises
    MixedFields; ints and Fractions are coerced into the element's field.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: FieldDescriptor, value: Any):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    # --- helpers ---

    def _coerce(self, other: Any) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is self.field or other.field == self.field:
                return other
            raise MixedFields(
                f"cannot combine {self.field} and {other.field}",
                {"left": str(self.field), "right": str(other.field)},
            )
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.element(other)
        return NotImplemented

    def is_zero(self) -> bool:
        if self.field.kind == QUADRATIC:
            return self.value[0].is_zero() and self.value[1].is_zero()
        return self.value == 0

    def is_one(self) -> bool:
        return self == self.field.one()

    # --- arithmetic ---

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.field
        if f.kind == QUADRATIC:
            return FieldElement(f, (self.value[0] + other.value[0], self.value[1] + other.value[1]))
        if f.kind == PRIME:
            return FieldElement(f, (self.value + other.value) % f.p)
        return FieldElement(f, self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        if f.kind == QUADRATIC:
            return FieldElement(f, (-self.value[0], -self.value[1]))
        if f.kind == PRIME:
            return FieldElement(f, (-self.value) % f.p)
        return FieldElement(f, -self.value)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.field
        if f.kind == QUADRATIC:
            u1, v1 = self.value
            u2, v2 = other.value
            return FieldElement(f, (u1 * u2 + f.delta * v1 * v2, u1 * v2 + u2 * v1))
        if f.kind == PRIME:
            return FieldElement(f, (self.value * other.value) % f.p)
        return FieldElement(f, self.value * other.value)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero(f"inverse of zero in {self.field}")
        f = self.field
        if f.kind == QUADRATIC:
            u, v = self.value
            norm = u * u - f.delta * v * v
            inv = norm.inverse()
            return FieldElement(f, (u * inv, -v * inv))
        if f.kind == PRIME:
            return FieldElement(f, pow(self.value, -1, f.p))
        return FieldElement(f, 1 / self.value)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "FieldElement":
        """u + v*sqrt(delta) -> u - v*sqrt(delta); identity outside extensions."""
        if self.field.kind != QUADRATIC:
            return self
        return FieldElement(self.field, (self.value[0], -self.value[1]))

    def norm(self) -> "FieldElement":
        """x * conjugate(x), an element of the base field."""
        if self.field.kind != QUADRATIC:
            return self
        u, v = self.value
        return u * u - self.field.delta * v * v

    def sqrt(self) -> Optional["FieldElement"]:
        """A square root in the same field, or None if there is none."""
        f = self.field
        if self.is_zero():
            return self
        if f.kind == RATIONAL:
            num, den = self.value.numerator, self.value.denominator
            if num < 0:
                return None
            rn, rd = isqrt(num), isqrt(den)
            if rn * rn != num or rd * rd != den:
                return None
            return FieldElement(f, Fraction(rn, rd))
        if f.kind == PRIME:
            root = sqrt_mod(self.value, f.p)
            return None if root is None else FieldElement(f, root % f.p)
        u, v = self.value
        if v.is_zero():
            r = u.sqrt()
            if r is not None:
                return FieldElement(f, (r, f.base.zero()))
            r = (u / f.delta).sqrt()
            return None if r is None else FieldElement(f, (f.base.zero(), r))
        n = self.norm().sqrt()
        if n is None:
            return None
        half = f.base.element(Fraction(1, 2))
        for t in ((u + n) * half, (u - n) * half):
            x = t.sqrt()
            if x is not None and not x.is_zero():
                return FieldElement(f, (x, v / (x * 2)))
        return None

    # --- comparison / hashing ---

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return (other.field is self.field or other.field == self.field) and self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            try:
                return self == self.field.element(other)
            except DivisionByZero:
                return False
        return NotImplemented

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        # matches hash() of the number the element equals; over GF(p) its canonical residue
        if self.field.kind == QUADRATIC:
            u, v = self.value
            return hash(u) if v.is_zero() else hash((u, v))
        return hash(self.value)

    def sort_key(self):
        if self.field.kind == QUADRATIC:
            return (self.value[0].sort_key(), self.value[1].sort_key())
        return self.value

    def __str__(self) -> str:
        f = self.field
        if f.kind == RATIONAL:
            return str(self.value)
        if f.kind == PRIME:
            return f"{self.value} mod {f.p}"
        u, v = self.value
        return f"{_wrap(str(u))} + {_wrap(str(v))} * sqrt({f.delta})"

    def __repr__(self) -> str:
        return f"FieldElement<{self} in {self.field}>"


def _wrap(text: str) -> str:
    return f"({text})" if " " in text else text


# --- descriptor factories ---

RATIONAL_FIELD = FieldDescriptor(RATIONAL)


def rational_field() -> FieldDescriptor:
    return RATIONAL_FIELD


@lru_cache(maxsize=None)
def prime_field(p: int) -> FieldDescriptor:
    return FieldDescriptor(PRIME, p=p)


def quadratic_extension(base: FieldDescriptor, delta: Any) -> FieldDescriptor:
    return FieldDescriptor(QUADRATIC, base=base, delta=base.element(delta))


def field_from_literal(literal: str) -> FieldDescriptor:
    """CLI field literal: 'rational' or 'gf:p'."""
    text = literal.strip().lower()
    if text in ("rational", "q", "qq"):
        return RATIONAL_FIELD
    match = re.match(r"^gf:(\d+)$", text)
    if match:
        try:
            return prime_field(int(match.group(1)))
        except ValueError as e:
            raise ScalarParseError(str(e))
    raise ScalarParseError(f"unknown field literal {literal!r} (expected rational or gf:p)")


def field_from_json(payload: Any) -> FieldDescriptor:
    if isinstance(payload, str):
        return field_from_literal(payload)
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ScalarParseError(f"field descriptor must be an object with 'kind', got {payload!r}")
    kind = payload["kind"]
    try:
        if kind == RATIONAL:
            return RATIONAL_FIELD
        if kind == PRIME:
            return prime_field(int(payload["p"]))
        if kind == QUADRATIC:
            base = field_from_json(payload["base"])
            return quadratic_extension(base, base.parse(str(payload["delta"])))
    except (KeyError, ValueError, TypeError) as e:
        if isinstance(e, ScalarParseError):
            raise
        raise ScalarParseError(f"invalid field descriptor {payload!r}: {e}")
    raise ScalarParseError(f"unknown field kind {kind!r}")


# --- operations ---

def field_arithmetic(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    """Named-operation entry point: op in {add, sub, mul, div}."""
    if x.field != y.field:
        raise MixedFields(f"cannot combine {x.field} and {y.field}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"Unsupported operation: {op}")


def least_non_residue(p: int) -> int:
    for r in range(2, p):
        if sqrt_mod(r, p) is None:
            return r
    raise EvenCharacteristic(f"GF({p}) has no quadratic non-residue")


def _squarefree_split(n: int) -> Tuple[int, int]:
    """n = s^2 * k with k square-free (sign kept on k)."""
    s, k = 1, 1 if n > 0 else -1
    for prime, exp in factorint(abs(n)).items():
        s *= prime ** (exp // 2)
        if exp % 2:
            k *= prime
    return s, k


def adjoin_square_root(x: FieldElement) -> Tuple[FieldDescriptor, FieldElement]:
    """
    Build the quadratic extension where x gets a square root.
    Returns (extension, sqrt(x) in the extension). x must not already be a square.
    """
    f = x.field
    if f.characteristic == 2:
        raise EvenCharacteristic("square roots in characteristic 2 are not supported")
    if f.height >= MAX_TOWER_HEIGHT:
        raise ExtensionHeightExceeded(
            f"sqrt({x}) needs a quadratic step beyond height {MAX_TOWER_HEIGHT}",
            {"field": str(f)},
        )
    if x.sqrt() is not None:
        raise ValueError(f"{x} is already a square in {f}")
    if f.kind == RATIONAL:
        num, den = x.value.numerator, x.value.denominator
        s, k = _squarefree_split(num * den)
        ext = quadratic_extension(f, k)
        return ext, FieldElement(ext, (f.zero(), f.element(Fraction(s, den))))
    if f.kind == PRIME:
        ext = quadratic_extension(f, least_non_residue(f.p))
        # x / delta is a residue because x and delta are both non-residues
        y = (x / ext.delta).sqrt()
        return ext, FieldElement(ext, (f.zero(), y))
    ext = quadratic_extension(f, x)
    return ext, ext.sqrt_delta()


@dataclass(frozen=True)
class QuadraticSolution:
    roots: Tuple[FieldElement, ...]
    extended: bool
    field: FieldDescriptor


def solve_quadratic(a2: FieldElement, a1: FieldElement, a0: FieldElement) -> QuadraticSolution:
    """
    Roots of a2*l^2 + a1*l + a0 as a multiset (a double root appears twice).

    Over GF(p) the residues are searched exhaustively and no extension is built.
    Over QQ or an extension of height < 2 a missing root is found in a freshly
    adjoined quadratic extension, flagged by `extended`.
    """
    field = a2.field
    a1, a0 = a2._coerce(a1), a2._coerce(a0)
    if a2.is_zero():
        raise ValueError("leading coefficient a2 must be nonzero")
    if field.characteristic == 2:
        raise EvenCharacteristic("quadratic solving needs odd characteristic")

    if field.kind == PRIME:
        roots = [x for x in field.elements() if (a2 * x + a1) * x + a0 == 0]
        if len(roots) == 1:
            roots = roots * 2
        return QuadraticSolution(tuple(roots), False, field)

    disc = a1 * a1 - a2 * a0 * 4
    root = disc.sqrt()
    extended = False
    if root is None:
        ext, root = adjoin_square_root(disc)
        a2, a1 = embed(a2, ext), embed(a1, ext)
        field, extended = ext, True
    two_a = a2 * 2
    roots = ((-a1 + root) / two_a, (-a1 - root) / two_a)
    return QuadraticSolution(roots, extended, field)


def embed(x: FieldElement, target: FieldDescriptor) -> FieldElement:
    """Canonical inclusion of x into a field whose tower contains x's field."""
    if x.field == target:
        return x
    tower = target.tower()
    if x.field not in tower:
        raise NotAnExtension(f"{target} is not an extension of {x.field}")
    value = x
    for ext in tower[tower.index(x.field) + 1:]:
        value = FieldElement(ext, (value, ext.base.zero()))
    return value


def project(x: FieldElement, base: FieldDescriptor) -> FieldElement:
    """Inverse of embed on its image; NotInBaseField if x has a sqrt part."""
    if x.field == base:
        return x
    if not x.field.extends(base):
        raise NotAnExtension(f"{x.field} is not an extension of {base}")
    value = x
    while value.field != base:
        u, v = value.value
        if not v.is_zero():
            raise NotInBaseField(f"{x} does not lie in {base}")
        value = u
    return value


def common_field(*fields: FieldDescriptor) -> FieldDescriptor:
    """The largest field of a chain of fields, one tower containing all others."""
    best = fields[0]
    for f in fields[1:]:
        if f.extends(best):
            best = f
        elif not best.extends(f):
            raise MixedFields(f"{best} and {f} do not lie in one tower")
    return best


def parse_scalars(field: FieldDescriptor, items) -> List[FieldElement]:
    return [field.element(item) for item in items]


def format_scalars(items) -> List[str]:
    return [str(x) for x in items]
