"""
Exact Linear Algebra

Dense matrices over one exact field, echelon-canonical subspaces, kernels,
characteristic polynomials, eigenspaces, spin-up and the Norton irreducibility
test for the module generated by two operators.

Vectors are plain tuples of FieldElement and are treated as column vectors.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy import divisors, factor_list

from engine.errors import (
    DimensionMismatch,
    DivisionByZero,
    EigenvalueSearchFailed,
    Inconclusive,
    MixedFields,
    NotDiagonalizable,
    TooLarge,
    ZeroVector,
)
from engine.exactfield import (
    PRIME,
    RATIONAL,
    FieldDescriptor,
    FieldElement,
    embed,
    project,
)
from engine.logger import debug
from engine.settings import get_setting

Vector = Tuple[FieldElement, ...]


def _rref(rows: List[List[FieldElement]], ncols: int) -> Tuple[List[List[FieldElement]], List[int]]:
    """Gauss-Jordan elimination in place. Returns (nonzero reduced rows, pivot columns)."""
    pivots = []
    piv_r = 0
    for piv_c in range(ncols):
        for i_row in range(piv_r, len(rows)):
            if not rows[i_row][piv_c].is_zero():
                break
        else:
            continue
        rows[piv_r], rows[i_row] = rows[i_row], rows[piv_r]
        inv = rows[piv_r][piv_c].inverse()
        rows[piv_r] = [x * inv for x in rows[piv_r]]
        for r in range(len(rows)):
            if r == piv_r:
                continue
            fr = rows[r][piv_c]
            if fr.is_zero():
                continue
            rows[r] = [a - b * fr for a, b in zip(rows[r], rows[piv_r])]
        pivots.append(piv_c)
        piv_r += 1
    return rows[:piv_r], pivots


def dot(u: Sequence[FieldElement], v: Sequence[FieldElement]) -> FieldElement:
    total = u[0].field.zero()
    for a, b in zip(u, v):
        total = total + a * b
    return total


def is_zero_vector(v: Sequence[FieldElement]) -> bool:
    return all(x.is_zero() for x in v)


class ExactMatrix:
    """Immutable dense matrix. `@` is the matrix product, `*` scales by a scalar."""

    __slots__ = ("field", "rows", "_entries")

    def __init__(self, field: FieldDescriptor, entries: Sequence[Sequence[FieldElement]]):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise DimensionMismatch("matrices need at least one row and one column")
        width = len(entries[0])
        for row in entries:
            if len(row) != width:
                raise DimensionMismatch("ragged matrix rows")
            for x in row:
                if x.field != field:
                    raise MixedFields(f"entry {x} is not in {field}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", len(entries))
        object.__setattr__(self, "_entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # --- construction ---

    @classmethod
    def from_rows(cls, field: FieldDescriptor, rows: Iterable[Iterable[Any]]) -> "ExactMatrix":
        return cls(field, [[field.element(x) for x in row] for row in rows])

    @classmethod
    def identity(cls, field: FieldDescriptor, n: int) -> "ExactMatrix":
        zero, one = field.zero(), field.one()
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: FieldDescriptor, rows: int, cols: int) -> "ExactMatrix":
        return cls(field, [[field.zero()] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, field: FieldDescriptor, values: Sequence[Any]) -> "ExactMatrix":
        zero = field.zero()
        values = [field.element(v) for v in values]
        n = len(values)
        return cls(field, [[values[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, field: FieldDescriptor, columns: Sequence[Vector]) -> "ExactMatrix":
        return cls(field, list(zip(*columns)))

    @classmethod
    def random(cls, field: FieldDescriptor, rows: int, cols: int, rng: random.Random, bound: int = 5) -> "ExactMatrix":
        return cls(field, [[field.random_element(rng, bound) for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def random_invertible(cls, field: FieldDescriptor, n: int, rng: random.Random, bound: int = 5) -> "ExactMatrix":
        while True:
            M = cls.random(field, n, n, rng, bound)
            if M.rank() == n:
                return M

    # --- shape / access ---

    @property
    def cols(self) -> int:
        return len(self._entries[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: Tuple[int, int]) -> FieldElement:
        i, j = index
        return self._entries[i][j]

    def row(self, i: int) -> Vector:
        return self._entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._entries)

    def entries(self) -> Tuple[Vector, ...]:
        return self._entries

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self._entries for x in row)

    def is_identity(self) -> bool:
        return self.is_square() and self == ExactMatrix.identity(self.field, self.rows)

    # --- arithmetic ---

    def _check_same(self, other: "ExactMatrix") -> None:
        if not isinstance(other, ExactMatrix):
            raise TypeError(f"expected ExactMatrix, got {type(other).__name__}")
        if other.field != self.field:
            raise MixedFields(f"cannot combine matrices over {self.field} and {other.field}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return ExactMatrix(self.field, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)])

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.field, [[-a for a in row] for row in self._entries])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __mul__(self, scalar: Any) -> "ExactMatrix":
        if isinstance(scalar, ExactMatrix):
            return NotImplemented
        c = self.field.element(scalar) if not isinstance(scalar, FieldElement) else scalar
        if c.field != self.field:
            raise MixedFields(f"scalar {c} is not in {self.field}")
        return ExactMatrix(self.field, [[c * a for a in row] for row in self._entries])

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        other_cols = [other.column(j) for j in range(other.cols)]
        return ExactMatrix(self.field, [[dot(row, col) for col in other_cols] for row in self._entries])

    def apply(self, v: Sequence[FieldElement]) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector of length {len(v)} for a {self.shape} matrix")
        return tuple(dot(row, v) for row in self._entries)

    def power(self, k: int) -> "ExactMatrix":
        if k < 0:
            return self.inverse().power(-k)
        result = ExactMatrix.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, list(zip(*self._entries)))

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def trace(self) -> FieldElement:
        total = self.field.zero()
        for i in range(min(self.shape)):
            total = total + self._entries[i][i]
        return total

    # --- elimination ---

    def rref(self) -> Tuple["ExactMatrix", List[int]]:
        rows, pivots = _rref([list(r) for r in self._entries], self.cols)
        zero_row = [self.field.zero()] * self.cols
        rows += [list(zero_row) for _ in range(self.rows - len(rows))]
        return ExactMatrix(self.field, rows), pivots

    def rank(self) -> int:
        return len(_rref([list(r) for r in self._entries], self.cols)[1])

    def inverse(self) -> "ExactMatrix":
        if not self.is_square():
            raise DimensionMismatch("only square matrices have inverses")
        n = self.rows
        zero, one = self.field.zero(), self.field.one()
        augmented = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(self._entries)]
        rows, pivots = _rref(augmented, 2 * n)
        if pivots[:n] != list(range(n)):
            raise DivisionByZero("matrix is singular")
        return ExactMatrix(self.field, [row[n:] for row in rows])

    def solve(self, rhs: Sequence[FieldElement]) -> Optional[Vector]:
        """One solution x of Mx = rhs (free variables set to 0), or None."""
        if len(rhs) != self.rows:
            raise DimensionMismatch("right-hand side length does not match row count")
        augmented = [list(row) + [b] for row, b in zip(self._entries, rhs)]
        rows, pivots = _rref(augmented, self.cols + 1)
        if pivots and pivots[-1] == self.cols:
            return None
        x = [self.field.zero()] * self.cols
        for row, c in zip(rows, pivots):
            x[c] = row[-1]
        return tuple(x)

    # --- field / basis change ---

    def conjugate_by(self, P: "ExactMatrix") -> "ExactMatrix":
        """P^-1 M P"""
        return P.inverse() @ self @ P

    def embed(self, target: FieldDescriptor) -> "ExactMatrix":
        if target == self.field:
            return self
        return ExactMatrix(target, [[embed(x, target) for x in row] for row in self._entries])

    def project(self, base: FieldDescriptor) -> "ExactMatrix":
        if base == self.field:
            return self
        return ExactMatrix(base, [[project(x, base) for x in row] for row in self._entries])

    def scalar_multiple_of(self, other: "ExactMatrix") -> Optional[FieldElement]:
        """c with self == c * other, or None. Zero `other` only matches a zero self."""
        self._check_same(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot compare {self.shape} and {other.shape}")
        pivot = next(((i, j) for i in range(other.rows) for j in range(other.cols) if not other[i, j].is_zero()), None)
        if pivot is None:
            return self.field.zero() if self.is_zero() else None
        c = self[pivot] / other[pivot]
        return c if other * c == self else None

    # --- comparison / serialization ---

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def to_strings(self) -> List[List[str]]:
        return [[str(x) for x in row] for row in self._entries]

    @classmethod
    def from_strings(cls, field: FieldDescriptor, rows: Sequence[Sequence[str]]) -> "ExactMatrix":
        return cls(field, [[field.parse(x) for x in row] for row in rows])

    def __repr__(self) -> str:
        return f"ExactMatrix<{self.rows}x{self.cols} over {self.field}: {self.to_strings()}>"


def scalar_matrix(field: FieldDescriptor, n: int, c: FieldElement) -> ExactMatrix:
    return ExactMatrix.identity(field, n) * c


# --- subspaces ---

@dataclass(frozen=True)
class Subspace:
    """
    A subspace of field^n stored by its reduced row echelon basis, so two
    subspaces are equal exactly when their dataclass fields are equal.
    """
    field: FieldDescriptor
    ambient_dim: int
    basis: Tuple[Vector, ...] = ()

    @classmethod
    def from_vectors(cls, field: FieldDescriptor, ambient_dim: int, vectors: Iterable[Sequence[FieldElement]]) -> "Subspace":
        rows = [list(v) for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in a {ambient_dim}-dim space")
        reduced, _ = _rref(rows, ambient_dim) if rows else ([], [])
        return cls(field, ambient_dim, tuple(tuple(r) for r in reduced))

    @classmethod
    def zero(cls, field: FieldDescriptor, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, ())

    @classmethod
    def full(cls, field: FieldDescriptor, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, ExactMatrix.identity(field, ambient_dim).entries())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def is_proper(self) -> bool:
        """Nonzero and not the whole space."""
        return 0 < self.dim < self.ambient_dim

    def contains(self, v: Sequence[FieldElement]) -> bool:
        return Subspace.from_vectors(self.field, self.ambient_dim, list(self.basis) + [v]).dim == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        return self.join(other).dim == self.dim

    def join(self, other: "Subspace") -> "Subspace":
        return Subspace.from_vectors(self.field, self.ambient_dim, self.basis + other.basis)

    def is_invariant_under(self, M: ExactMatrix) -> bool:
        return all(self.contains(M.apply(b)) for b in self.basis)

    def annihilator(self) -> "Subspace":
        """All w with b . w = 0 for every basis vector b."""
        if self.is_zero():
            return Subspace.full(self.field, self.ambient_dim)
        return kernel(ExactMatrix(self.field, self.basis))

    def embed(self, target: FieldDescriptor) -> "Subspace":
        return Subspace.from_vectors(target, self.ambient_dim, [[embed(x, target) for x in v] for v in self.basis])

    def to_strings(self) -> List[List[str]]:
        return [[str(x) for x in v] for v in self.basis]


class _EchelonBasis:
    """Incremental echelon basis keyed by pivot column, used by spin-up."""

    def __init__(self, field: FieldDescriptor, n: int):
        self.field = field
        self.n = n
        self.rows: Dict[int, List[FieldElement]] = {}

    def reduce(self, v: Sequence[FieldElement]) -> List[FieldElement]:
        w = list(v)
        for c in sorted(self.rows):
            if not w[c].is_zero():
                f = w[c]
                w = [a - b * f for a, b in zip(w, self.rows[c])]
        return w

    def insert(self, v: Sequence[FieldElement]) -> bool:
        w = self.reduce(v)
        pivot = next((i for i, x in enumerate(w) if not x.is_zero()), None)
        if pivot is None:
            return False
        inv = w[pivot].inverse()
        self.rows[pivot] = [x * inv for x in w]
        return True

    def __len__(self):
        return len(self.rows)

    def subspace(self) -> Subspace:
        return Subspace.from_vectors(self.field, self.n, self.rows.values())


def kernel(M: ExactMatrix) -> Subspace:
    """Null space {v : Mv = 0} in canonical echelon form."""
    rows, pivots = _rref([list(r) for r in M.entries()], M.cols)
    zero, one = M.field.zero(), M.field.one()
    free = [c for c in range(M.cols) if c not in pivots]
    vectors = []
    for f in free:
        v = [zero] * M.cols
        v[f] = one
        for row, c in zip(rows, pivots):
            v[c] = -row[f]
        vectors.append(v)
    return Subspace.from_vectors(M.field, M.cols, vectors)


def spin_up(v: Sequence[FieldElement], generators: Sequence[ExactMatrix]) -> Subspace:
    """Smallest subspace containing v and closed under every generator."""
    if is_zero_vector(v):
        raise ZeroVector("cannot spin up the zero vector")
    field = v[0].field
    n = len(v)
    for G in generators:
        if G.shape != (n, n):
            raise DimensionMismatch(f"generator of shape {G.shape} acting on dimension {n}")
    basis = _EchelonBasis(field, n)
    basis.insert(v)
    queue = [tuple(v)]
    while queue and len(basis) < n:
        w = queue.pop(0)
        for G in generators:
            image = G.apply(w)
            if basis.insert(image):
                queue.append(image)
    return basis.subspace() if len(basis) < n else Subspace.full(field, n)


# --- characteristic polynomial and eigenvalues ---

def characteristic_polynomial(M: ExactMatrix) -> List[FieldElement]:
    """
    Coefficients of det(xI - M), leading coefficient first, via Berkowitz's
    division-free recursion (so it is valid over every supported field).
    """
    if not M.is_square():
        raise DimensionMismatch("characteristic polynomial needs a square matrix")
    field = M.field
    entries = [list(r) for r in M.entries()]

    def berkowitz(rows: List[List[FieldElement]]) -> List[FieldElement]:
        n = len(rows)
        if n == 0:
            return [field.one()]
        a = rows[0][0]
        R = rows[0][1:]
        C = [r[0] for r in rows[1:]]
        sub = [r[1:] for r in rows[1:]]
        # t = [1, -a, -R C, -R sub C, -R sub^2 C, ...]
        t = [field.one(), -a]
        col = C
        for _ in range(n - 1):
            t.append(-dot(R, col) if R else field.zero())
            col = [dot(r, col) for r in sub]
        inner = berkowitz(sub)
        return [
            sum((t[i - j] * inner[j] for j in range(len(inner)) if 0 <= i - j < len(t)), field.zero())
            for i in range(n + 1)
        ]

    return berkowitz(entries)


def evaluate_polynomial(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    result = x.field.zero()
    for c in coeffs:
        result = result * x + c
    return result


def _deflate(coeffs: Sequence[FieldElement], r: FieldElement) -> List[FieldElement]:
    """Synthetic division by (x - r); assumes r is a root."""
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * r)
    return out


def root_multiplicity(coeffs: Sequence[FieldElement], r: FieldElement) -> int:
    m = 0
    coeffs = list(coeffs)
    while len(coeffs) > 1 and evaluate_polynomial(coeffs, r).is_zero():
        coeffs = _deflate(coeffs, r)
        m += 1
    return m


def _rational_roots(coeffs: Sequence[FieldElement]) -> List[FieldElement]:
    """Rational root theorem on the cleared-denominator integer polynomial."""
    field = coeffs[0].field
    values = [c.value for c in coeffs]
    roots = []
    while len(values) > 1 and values[-1] == 0:
        values.pop()
        if not roots:
            roots.append(field.zero())
    if len(values) <= 1:
        return roots
    scale = lcm(*(v.denominator for v in values))
    ints = [int(v * scale) for v in values]
    lead, trail = abs(ints[0]), abs(ints[-1])
    seen = set()
    for num in divisors(trail):
        for den in divisors(lead):
            for sign in (1, -1):
                cand = Fraction(sign * num, den)
                if cand in seen:
                    continue
                seen.add(cand)
                x = field.element(cand)
                if evaluate_polynomial(coeffs, x).is_zero():
                    roots.append(x)
    return roots


def _quadratic_field_roots(coeffs: Sequence[FieldElement]) -> List[FieldElement]:
    """Roots in Q(sqrt k): factor the norm f * conj(f) over Q and test its linear and quadratic factors."""
    field = coeffs[0].field
    base = field.base
    conj = [c.conjugate() for c in coeffs]
    degree = len(coeffs) - 1
    product = [field.zero()] * (2 * degree + 1)
    for i, a in enumerate(coeffs):
        for j, b in enumerate(conj):
            product[i + j] = product[i + j] + a * b
    norm = [project(c, base) for c in product]
    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.value.numerator, c.value.denominator) * x ** (2 * degree - i) for i, c in enumerate(norm))
    roots = []
    for factor, _ in factor_list(expr)[1]:
        poly = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(factor, x).all_coeffs()]
        if len(poly) == 2:
            candidates = [field.element(-poly[1] / poly[0])]
        elif len(poly) == 3:
            a2, a1, a0 = (field.element(c) for c in poly)
            disc = (a1 * a1 - a2 * a0 * 4).sqrt()
            if disc is None:
                continue
            candidates = [(-a1 + disc) / (a2 * 2), (-a1 - disc) / (a2 * 2)]
        else:
            continue
        for r in candidates:
            if r not in roots and evaluate_polynomial(coeffs, r).is_zero():
                roots.append(r)
    return roots


def polynomial_roots(coeffs: Sequence[FieldElement],
                     candidates: Optional[Sequence[FieldElement]] = None,
                     strict: bool = True) -> List[FieldElement]:
    """
    Distinct roots of a polynomial (leading coefficient first) lying in its field.

    Exact searches: rational root theorem over QQ, exhaustion over finite fields,
    norm factorization over QQ(sqrt k). Over a height-2 tower on QQ only the
    supplied `candidates` are tested; with none, `strict` decides between
    raising EigenvalueSearchFailed and returning [].
    """
    field = coeffs[0].field
    roots: List[FieldElement] = []
    if field.is_finite:
        roots = [x for x in field.elements() if evaluate_polynomial(coeffs, x).is_zero()]
    elif field.kind == RATIONAL:
        roots = _rational_roots(coeffs)
    elif field.height == 1:
        roots = _quadratic_field_roots(coeffs)
    elif not candidates and strict:
        raise EigenvalueSearchFailed(
            f"no exact root search over {field}; pass eigenvalue candidates",
            {"field": str(field)},
        )
    for c in candidates or ():
        c = field.element(c)
        if c not in roots and evaluate_polynomial(coeffs, c).is_zero():
            roots.append(c)
    return sorted(set(roots), key=lambda r: r.sort_key())


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: Tuple[FieldElement, ...]
    eigenspaces: Tuple[Subspace, ...]
    multiplicities: Tuple[int, ...]
    characteristic_polynomial: Tuple[FieldElement, ...]

    @property
    def diagonalizable(self) -> bool:
        return sum(W.dim for W in self.eigenspaces) == len(self.characteristic_polynomial) - 1

    def pairs(self) -> List[Tuple[FieldElement, Subspace]]:
        return list(zip(self.eigenvalues, self.eigenspaces))

    def eigenspace(self, theta: FieldElement) -> Subspace:
        return self.eigenspaces[self.eigenvalues.index(theta)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": [str(t) for t in self.eigenvalues],
            "eigenspace_dims": [W.dim for W in self.eigenspaces],
            "multiplicities": list(self.multiplicities),
            "diagonalizable": self.diagonalizable,
        }


def eigen_decompose(M: ExactMatrix, candidates: Optional[Sequence[FieldElement]] = None) -> EigenDecomposition:
    """
    All eigenvalues of M with their eigenspaces. The characteristic polynomial
    must split over M's field; EigenvalueSearchFailed otherwise.
    """
    if not M.is_square():
        raise DimensionMismatch("eigen_decompose needs a square matrix")
    charpoly = characteristic_polynomial(M)
    roots = polynomial_roots(charpoly, candidates)
    multiplicities = [root_multiplicity(charpoly, r) for r in roots]
    if sum(multiplicities) < M.rows:
        raise EigenvalueSearchFailed(
            f"characteristic polynomial does not split over {M.field}",
            {"found": [str(r) for r in roots], "degree": M.rows},
        )
    I = ExactMatrix.identity(M.field, M.rows)
    spaces = [kernel(M - I * r) for r in roots]
    return EigenDecomposition(tuple(roots), tuple(spaces), tuple(multiplicities), tuple(charpoly))


def require_diagonalizable(M: ExactMatrix, name: str = "M") -> EigenDecomposition:
    decomposition = eigen_decompose(M)
    if not decomposition.diagonalizable:
        raise NotDiagonalizable(f"{name} is not diagonalizable over {M.field}", decomposition.to_dict())
    return decomposition


# --- irreducibility ---

@dataclass(frozen=True)
class IrreducibilityVerdict:
    irreducible: bool
    witness: Optional[Subspace] = None
    method: str = "norton"
    pivot: Optional[str] = None
    seed: Optional[Any] = None
    words_tried: int = 0

    def __bool__(self):
        return self.irreducible

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "irreducible": self.irreducible,
            "method": self.method,
            "seed": self.seed,
            "words_tried": self.words_tried,
        }
        if self.pivot is not None:
            result["pivot"] = self.pivot
        if self.witness is not None:
            result["witness"] = self.witness.to_strings()
        return result


def _norton_pivot(X: ExactMatrix, generators: Sequence[ExactMatrix]) -> Tuple[Optional[bool], Optional[Subspace]]:
    """
    One round of Norton's test with the singular element X.
    Returns (False, witness) when reducible, (True, None) when X proves
    irreducibility and (None, None) when X decides nothing.
    """
    n = X.rows
    K = kernel(X)
    if K.is_zero():
        return None, None
    for w in K.basis:
        S = spin_up(w, generators)
        if S.is_proper():
            return False, S
    if K.dim != 1:
        return None, None
    u = kernel(X.transpose()).basis[0]
    dual = spin_up(u, [G.transpose() for G in generators])
    if dual.dim < n:
        return False, dual.annihilator()
    return True, None


def _random_word(words: List[ExactMatrix], rng: random.Random, field: FieldDescriptor, bound: int) -> ExactMatrix:
    """Grow the word list by one product and return a random combination of it."""
    words.append(words[rng.randrange(len(words))] @ words[rng.randrange(len(words))])
    X = ExactMatrix.zeros(field, words[0].rows, words[0].cols)
    for W in words:
        X = X + W * field.random_element(rng, bound)
    return X


def is_irreducible_pair(A: ExactMatrix, Astar: ExactMatrix, seed: Optional[Any] = None,
                        max_words: Optional[int] = None) -> IrreducibilityVerdict:
    """
    Decide whether A and A* have a common invariant subspace other than 0 and V.

    Pivot elements A* - t*I and A - tI come first (for sharp pairs the first one
    already has nullity 1); seeded random words follow. Tiny finite fields fall
    back to exhaustive enumeration; anything else undecided is Inconclusive.
    """
    if A.field != Astar.field:
        raise MixedFields(f"A is over {A.field} but A* is over {Astar.field}")
    if not A.is_square() or A.shape != Astar.shape:
        raise DimensionMismatch(f"A {A.shape} and A* {Astar.shape} must be square of equal size")
    seed = get_setting("seed", 0) if seed is None else seed
    max_words = get_setting("norton_random_words", 24) if max_words is None else max_words
    field, n = A.field, A.rows
    if n == 1:
        return IrreducibilityVerdict(True, method="trivial", seed=seed)

    generators = [A, Astar]
    I = ExactMatrix.identity(field, n)
    for name, M in (("A*", Astar), ("A", A)):
        for theta in require_diagonalizable(M, name).eigenvalues:
            verdict, witness = _norton_pivot(M - I * theta, generators)
            if verdict is not None:
                debug(f"🔍 Norton pivot {name} - ({theta})I decided: irreducible={verdict}")
                return IrreducibilityVerdict(verdict, witness, "norton", f"{name} - ({theta})I", seed)

    rng = random.Random(seed)
    bound = get_setting("norton_coefficient_bound", 5)
    words = [A, Astar]
    for attempt in range(1, max_words + 1):
        X = _random_word(words, rng, field, bound)
        for lam in polynomial_roots(characteristic_polynomial(X), strict=False):
            verdict, witness = _norton_pivot(X - I * lam, generators)
            if verdict is not None:
                debug(f"🔍 Norton random word {attempt} decided: irreducible={verdict}")
                return IrreducibilityVerdict(verdict, witness, "norton_random_word",
                                             f"word {attempt} - ({lam})I", seed, attempt)

    if field.kind == PRIME and field.p in get_setting("brute_force_primes", [2, 3]) \
            and n <= get_setting("brute_force_max_dim", 4):
        invariant = [S for S in brute_force_invariant_subspaces(A, Astar) if S.is_proper()]
        witness = min(invariant, key=lambda S: S.dim) if invariant else None
        return IrreducibilityVerdict(not invariant, witness, "brute_force", None, seed, max_words)

    raise Inconclusive(
        f"Norton test undecided after {max_words} random words over {field}",
        {"seed": seed, "words": max_words},
    )


def all_subspaces(field: FieldDescriptor, n: int) -> Iterable[Subspace]:
    """Every subspace of a small finite vector space, one RREF pattern at a time."""
    elements = list(field.elements())
    zero, one = field.zero(), field.one()
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            free = [(r, c) for r, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivots]
            for values in itertools.product(elements, repeat=len(free)):
                rows = [[zero] * n for _ in range(k)]
                for r, p in enumerate(pivots):
                    rows[r][p] = one
                for (r, c), x in zip(free, values):
                    rows[r][c] = x
                yield Subspace(field, n, tuple(tuple(row) for row in rows))


def brute_force_invariant_subspaces(A: ExactMatrix, Astar: ExactMatrix) -> List[Subspace]:
    """Every common invariant subspace of A and A*, by exhaustive enumeration."""
    field, n = A.field, A.rows
    primes = get_setting("brute_force_primes", [2, 3])
    max_dim = get_setting("brute_force_max_dim", 4)
    if field.kind != PRIME or field.p not in primes or n > max_dim:
        raise TooLarge(
            f"exhaustive enumeration needs GF(p) with p in {primes} and dimension <= {max_dim}",
            {"field": str(field), "dimension": n},
        )
    if A.shape != Astar.shape or Astar.field != field:
        raise DimensionMismatch("A and A* must share field and shape")
    return [S for S in all_subspaces(field, n) if S.is_invariant_under(A) and S.is_invariant_under(Astar)]
