"""
q-Racah Parametrization

Generate eigenvalue data from q-Racah parameters

    theta_i  = a  + b  q^(2i-d) + c  q^(d-2i)
    theta*_i = a* + b* q^(2i-d) + c* q^(d-2i)

and fit such parameters back to eigenvalue data. q is found from the common
ratio beta = q^2 + q^-2 + 1 through t^2 - (beta - 1) t + 1 = 0 with t = q^2,
building quadratic extensions when a root is missing.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from engine.errors import (
    EvenCharacteristic,
    ExtensionHeightExceeded,
    InvalidQRacahParameters,
    MixedFields,
    NotAnExtension,
)
from engine.exactfield import (
    PRIME,
    FieldDescriptor,
    FieldElement,
    adjoin_square_root,
    embed,
    field_from_json,
    least_non_residue,
    quadratic_extension,
    solve_quadratic,
)
from engine.exactlinalg import ExactMatrix
from engine.logger import debug
from engine.paramarray import ratio_values, ratios_agree

# NotQRacah reasons
NOT_DISTINCT = "sequence not distinct"
RATIO = "ratio not constant"
NO_Q = "no q in allowed extensions"
INCONSISTENT = "linear system inconsistent"
CONSTRAINT = "q-Racah constraint violated"

PARAMETER_NAMES = ("q", "a", "b", "c", "a_star", "b_star", "c_star")


@dataclass(frozen=True)
class QRacahParameters:
    d: int
    q: FieldElement
    a: FieldElement
    b: FieldElement
    c: FieldElement
    a_star: FieldElement
    b_star: FieldElement
    c_star: FieldElement

    def __post_init__(self):
        if self.d < 0:
            raise InvalidQRacahParameters(f"d must be nonnegative, got {self.d}")
        values = [getattr(self, name) for name in PARAMETER_NAMES]
        if any(x.field != self.q.field for x in values):
            raise MixedFields("q-Racah parameters must share one field")
        if self.q.field.characteristic == 2:
            raise EvenCharacteristic("q-Racah parameters need odd characteristic")
        problem = q_constraint_violation(self.q)
        if problem is None and (self.b * self.b_star * self.c * self.c_star).is_zero():
            problem = "b b* c c* = 0"
        if problem is not None:
            raise InvalidQRacahParameters(f"{CONSTRAINT}: {problem}", {"parameters": self.to_json()})

    @property
    def field(self) -> FieldDescriptor:
        return self.q.field

    @property
    def beta(self) -> FieldElement:
        return beta_of(self)

    def inverted(self) -> "QRacahParameters":
        """(q^-1, a, c, b, a*, c*, b*) gives the same sequences."""
        return QRacahParameters(self.d, self.q.inverse(), self.a, self.c, self.b,
                                self.a_star, self.c_star, self.b_star)

    def to_json(self) -> Dict[str, Any]:
        payload = {name: str(getattr(self, name)) for name in PARAMETER_NAMES}
        payload["d"] = self.d
        payload["field"] = self.field.to_json()
        return payload

    @classmethod
    def from_json(cls, payload: Dict[str, Any], field: Optional[FieldDescriptor] = None) -> "QRacahParameters":
        if field is None:
            field = field_from_json(payload["field"])
        return cls(int(payload["d"]), *(field.parse(str(payload[name])) for name in PARAMETER_NAMES))


def q_constraint_violation(q: FieldElement) -> Optional[str]:
    if q.is_zero():
        return "q = 0"
    q2 = q * q
    if q2.is_one():
        return "q^2 = 1"
    if (q2 + 1).is_zero():
        return "q^2 = -1"
    return None


def beta_of(P: QRacahParameters) -> FieldElement:
    q2 = P.q * P.q
    return q2 + q2.inverse() + 1


# --- generation ---

@dataclass(frozen=True)
class SequencePair:
    theta: Tuple[FieldElement, ...]
    theta_star: Tuple[FieldElement, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"theta": [str(t) for t in self.theta], "theta_star": [str(t) for t in self.theta_star]}


@dataclass(frozen=True)
class DegenerateSpectrum:
    """Generated values collide: (which sequence, i, j) names the first collision."""
    which: str
    i: int
    j: int
    value: FieldElement

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": "DegenerateSpectrum", "sequence": self.which, "i": self.i, "j": self.j,
                "value": str(self.value)}


def q_racah_value(a: FieldElement, b: FieldElement, c: FieldElement, q: FieldElement, i: int, d: int) -> FieldElement:
    return a + b * q ** (2 * i - d) + c * q ** (d - 2 * i)


def _first_collision(values: Sequence[FieldElement]) -> Optional[Tuple[int, int]]:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j]:
                return i, j
    return None


def generate_sequences(P: QRacahParameters) -> Union[SequencePair, DegenerateSpectrum]:
    theta = tuple(q_racah_value(P.a, P.b, P.c, P.q, i, P.d) for i in range(P.d + 1))
    theta_star = tuple(q_racah_value(P.a_star, P.b_star, P.c_star, P.q, i, P.d) for i in range(P.d + 1))
    for name, seq in (("theta", theta), ("theta_star", theta_star)):
        collision = _first_collision(seq)
        if collision is not None:
            return DegenerateSpectrum(name, collision[0], collision[1], seq[collision[0]])
    return SequencePair(theta, theta_star)


# --- fitting ---

@dataclass(frozen=True)
class NotQRacah:
    reason: str
    details: Dict[str, Any] = dc_field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": "NotQRacah", "reason": self.reason, "details": self.details}


def _solve_coefficients(values: Sequence[FieldElement], q: FieldElement,
                        fixed: Optional[Dict[str, FieldElement]] = None) -> Optional[Tuple[FieldElement, ...]]:
    """
    (a, b, c) with values[i] = a + b q^(2i-d) + c q^(d-2i) for every i, solving
    from rows {0, 1, d} and verifying all rows. Entries of `fixed` are not solved for.
    """
    field = q.field
    d = len(values) - 1
    fixed = fixed or {}
    unknowns = [name for name in ("a", "b", "c") if name not in fixed]
    zero = field.zero()

    def row(i):
        return {"a": field.one(), "b": q ** (2 * i - d), "c": q ** (d - 2 * i)}

    def residual(i):
        r = row(i)
        rhs = values[i]
        for name, value in fixed.items():
            rhs = rhs - r[name] * value
        return rhs

    solution = dict(fixed)
    if unknowns:
        picked = sorted({0, min(1, d), d})
        M = ExactMatrix(field, [[row(i)[u] for u in unknowns] for i in picked])
        x = M.solve([residual(i) for i in picked])
        if x is None:
            return None
        solution.update(zip(unknowns, x))
    for i in range(d + 1):
        if q_racah_value(solution["a"], solution["b"], solution["c"], q, i, d) != values[i]:
            return None
    return solution.get("a", zero), solution.get("b", zero), solution.get("c", zero)


def _attempt(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement], q: FieldElement,
             fixed: Optional[Dict[str, FieldElement]] = None,
             fixed_star: Optional[Dict[str, FieldElement]] = None) -> Union[QRacahParameters, NotQRacah]:
    field = q.field
    theta = [embed(t, field) for t in theta]
    theta_star = [embed(t, field) for t in theta_star]
    problem = q_constraint_violation(q)
    if problem is not None:
        return NotQRacah(CONSTRAINT, {"q": str(q), "violation": problem})
    plain = _solve_coefficients(theta, q, fixed)
    starred = _solve_coefficients(theta_star, q, fixed_star)
    if plain is None or starred is None:
        return NotQRacah(INCONSISTENT, {"q": str(q), "sequence": "theta" if plain is None else "theta_star"})
    try:
        return QRacahParameters(len(theta) - 1, q, *plain, *starred)
    except InvalidQRacahParameters as e:
        return NotQRacah(CONSTRAINT, {"q": str(q), "violation": str(e)})


_STAGE = {CONSTRAINT: 0, INCONSISTENT: 1}


def _q_square_roots(t: FieldElement) -> Tuple[FieldElement, ...]:
    """q with q^2 = t, extending the field once when needed."""
    root = t.sqrt()
    if root is None:
        if t.field.kind == PRIME:
            ext = quadratic_extension(t.field, least_non_residue(t.field.p))
            root = embed(t, ext).sqrt()
        else:
            _, root = adjoin_square_root(t)
    return root, -root


def _common_field(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> FieldDescriptor:
    field = theta[0].field
    if any(x.field != field for x in list(theta) + list(theta_star)):
        raise MixedFields("theta and theta_star must share one field")
    if field.characteristic == 2:
        raise EvenCharacteristic("q-Racah fitting needs odd characteristic")
    return field


def fit(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement]
        ) -> Union[List[QRacahParameters], NotQRacah, "ParametricFamily"]:
    """
    All q-Racah parameter tuples reproducing (theta, theta_star) exactly.

    For d >= 3 the result is closed under q -> -q and q -> q^-1 (with b, c
    swapped). For d <= 2 beta is unconstrained and a ParametricFamily is returned.
    """
    if len(theta) != len(theta_star) or not theta:
        raise ValueError("theta and theta_star must have the same positive length")
    field = _common_field(theta, theta_star)
    d = len(theta) - 1
    for name, seq in (("theta", theta), ("theta_star", theta_star)):
        collision = _first_collision(seq)
        if collision is not None:
            return NotQRacah(NOT_DISTINCT, {"sequence": name, "i": collision[0], "j": collision[1]})
    if d <= 2:
        return ParametricFamily(tuple(theta), tuple(theta_star))

    if not ratios_agree(theta, theta_star):
        return NotQRacah(RATIO, {
            "theta_ratios": [None if r is None else str(r) for r in ratio_values(theta)],
            "theta_star_ratios": [None if r is None else str(r) for r in ratio_values(theta_star)],
        })
    beta = ratio_values(theta)[0]
    one = field.one()
    try:
        solution = solve_quadratic(one, -(beta - 1), one)
        if not solution.roots and field.kind == PRIME:
            ext = quadratic_extension(field, least_non_residue(field.p))
            solution = solve_quadratic(ext.one(), embed(-(beta - 1), ext), ext.one())
        t = solution.roots[0]
        q = _q_square_roots(t)[0]
    except (ExtensionHeightExceeded, IndexError) as e:
        return NotQRacah(NO_Q, {"beta": str(beta), "error": str(e)})

    candidates = []
    for c in (q, -q, q.inverse(), -q.inverse()):
        if c not in candidates:
            candidates.append(c)
    fits, failure = [], None
    for c in candidates:
        result = _attempt(theta, theta_star, c)
        if isinstance(result, QRacahParameters):
            fits.append(result)
        elif failure is None or _STAGE[result.reason] > _STAGE[failure.reason]:
            failure = result
    debug(f"🔍 q-Racah fit: beta={beta}, {len(fits)} of {len(candidates)} q candidates survive")
    if not fits:
        details = dict(failure.details)
        details["beta"] = str(beta)
        return NotQRacah(failure.reason, details)
    return sorted(fits, key=lambda P: str(P.q))


# --- underdetermined diameters ---

@dataclass(frozen=True)
class ParametricFamily:
    """
    For d <= 2 every admissible q works; which other parameters are free depends on d:
    d = 2 only q, d = 1 also a and a*, d = 0 also b, c, b*, c*.
    """
    theta: Tuple[FieldElement, ...]
    theta_star: Tuple[FieldElement, ...]

    @property
    def d(self) -> int:
        return len(self.theta) - 1

    @property
    def field(self) -> FieldDescriptor:
        return self.theta[0].field

    @property
    def free_parameters(self) -> Tuple[str, ...]:
        if self.d == 2:
            return ("q",)
        if self.d == 1:
            return ("q", "a", "a_star")
        return ("q", "b", "c", "b_star", "c_star")

    def solve_at(self, q: Any, extra: Optional[Dict[str, Any]] = None) -> Union[QRacahParameters, NotQRacah]:
        """The parameter tuple for a chosen q and values of the other free parameters."""
        q = q if isinstance(q, FieldElement) else self.field.element(q)
        extra = {k: q.field.element(v) if not isinstance(v, FieldElement) else embed(v, q.field)
                 for k, v in (extra or {}).items()}
        unknown = set(extra) - set(self.free_parameters)
        if unknown:
            raise ValueError(f"{sorted(unknown)} are not free parameters at d = {self.d}")
        missing = set(self.free_parameters) - {"q"} - set(extra)
        if missing:
            raise ValueError(f"missing values for {sorted(missing)}")
        fixed = {k: v for k, v in extra.items() if not k.endswith("_star")}
        fixed_star = {k[:-len("_star")]: v for k, v in extra.items() if k.endswith("_star")}
        return _attempt(self.theta, self.theta_star, q, fixed, fixed_star)

    def _default_extras(self) -> List[Dict[str, int]]:
        if self.d == 2:
            return [{}]
        if self.d == 1:
            return [{"a": a, "a_star": s} for a in range(0, 4) for s in range(0, 4)]
        return [{"b": b, "c": c, "b_star": b, "c_star": c} for b in range(1, 4) for c in range(1, 4)]

    def sample(self, max_q: int = 12) -> Union[QRacahParameters, NotQRacah]:
        """A concrete witness with the smallest admissible integer q."""
        field = self.field
        for k in range(2, max_q + 1):
            q = field.element(k)
            if q_constraint_violation(q) is not None:
                continue
            for extra in self._default_extras():
                result = self.solve_at(q, extra)
                if isinstance(result, QRacahParameters):
                    return result
        return NotQRacah(NO_Q, {"searched_q_up_to": max_q})

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": "ParametricFamily", "d": self.d, "free_parameters": list(self.free_parameters)}


def regenerates(P: QRacahParameters, theta: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> bool:
    """True when P's sequences equal the inputs after embedding them into P's field."""
    generated = generate_sequences(P)
    if not isinstance(generated, SequencePair) or len(theta) != P.d + 1 or len(theta_star) != P.d + 1:
        return False
    try:
        theta = tuple(embed(t, P.field) for t in theta)
        theta_star = tuple(embed(t, P.field) for t in theta_star)
    except NotAnExtension:
        return False
    return generated.theta == theta and generated.theta_star == theta_star


def is_qracah(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> bool:
    """Distinct values plus some parameter tuple reproducing them."""
    result = fit(theta, theta_star)
    if isinstance(result, ParametricFamily):
        result = result.sample()
        return isinstance(result, QRacahParameters)
    return isinstance(result, list) and bool(result)
