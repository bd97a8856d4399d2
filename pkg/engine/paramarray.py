"""
Parameter Arrays

The tau/eta polynomials, split sequences of sharp systems and the checker for
conditions (i)-(iii) that a parameter array of a sharp tridiagonal system must
satisfy.

    tau_i(x) = (x - theta_0)(x - theta_1)...(x - theta_{i-1})
    eta_i(x) = (x - theta_d)(x - theta_{d-1})...(x - theta_{d-i+1})
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from engine.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotScalarMultiple,
    NotSharp,
    OnlyIfViolated,
)
from engine.exactfield import FieldDescriptor, FieldElement, field_from_json
from engine.exactlinalg import ExactMatrix
from engine.tdsystem import TriDiagonalSystem, Verdict

TAU_KINDS = ("tau", "eta", "tau_star", "eta_star")


@dataclass(frozen=True)
class MonicShiftProduct:
    """prod (x - r) over the stored roots, in order."""
    field: FieldDescriptor
    roots: Tuple[FieldElement, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.roots)

    def is_monic(self) -> bool:
        return self.coefficients()[0].is_one()

    def coefficients(self) -> List[FieldElement]:
        """Leading coefficient first."""
        coeffs = [self.field.one()]
        for r in self.roots:
            shifted = coeffs + [self.field.zero()]
            for k in range(1, len(shifted)):
                shifted[k] = shifted[k] - coeffs[k - 1] * r
            coeffs = shifted
        return coeffs

    def evaluate(self, x: Any) -> FieldElement:
        value = self.field.one()
        for r in self.roots:
            value = value * (x - r)
        return value

    __call__ = evaluate

    def evaluate_matrix(self, M: ExactMatrix) -> ExactMatrix:
        I = ExactMatrix.identity(M.field, M.rows)
        result = I
        for r in self.roots:
            result = result @ (M - I * r)
        return result


def tau_eta_build(theta: Sequence[FieldElement], which: str, i: int) -> MonicShiftProduct:
    """
    tau (tau_star) uses theta_0..theta_{i-1} ascending, eta (eta_star) uses
    theta_d..theta_{d-i+1} descending; the starred kinds are read off the
    dual sequence passed in.
    """
    if which not in TAU_KINDS:
        raise ValueError(f"Unknown polynomial kind: {which} (expected one of {TAU_KINDS})")
    d = len(theta) - 1
    if not 0 <= i <= d:
        raise IndexOutOfRange(f"degree {i} outside 0..{d}", {"i": i, "d": d})
    field = theta[0].field
    if which.startswith("tau"):
        return MonicShiftProduct(field, tuple(theta[:i]))
    return MonicShiftProduct(field, tuple(theta[d - k] for k in range(i)))


def tau(theta: Sequence[FieldElement], i: int) -> MonicShiftProduct:
    return tau_eta_build(theta, "tau", i)


def eta(theta: Sequence[FieldElement], i: int) -> MonicShiftProduct:
    return tau_eta_build(theta, "eta", i)


def dual_gap_product(theta_star: Sequence[FieldElement], i: int) -> FieldElement:
    """(theta*_0 - theta*_1)(theta*_0 - theta*_2)...(theta*_0 - theta*_i)"""
    value = theta_star[0].field.one()
    for k in range(1, i + 1):
        value = value * (theta_star[0] - theta_star[k])
    return value


# --- split sequence ---

def split_matrices(S: TriDiagonalSystem) -> Tuple[List[ExactMatrix], List[FieldElement]]:
    """
    M_i = E*_0 tau_i(A) E*_0 for i = 0..d, each checked to be a scalar multiple
    of E*_0, together with those scalars. tau_i(A) reuses the prefix tau_{i-1}(A).
    """
    if not S.sharp:
        raise NotSharp(f"system has shape {list(S.rho)}; split sequences need rho_0 = 1", {"shape": list(S.rho)})
    E0 = S.E_star[0]
    I = ExactMatrix.identity(S.field, S.dimension)
    prefix = I
    matrices, scalars = [], []
    for i in range(S.d + 1):
        if i > 0:
            prefix = prefix @ (S.A - I * S.theta[i - 1])
        M = E0 @ prefix @ E0
        scalar = M.scalar_multiple_of(E0)
        if scalar is None:
            raise NotScalarMultiple(f"E*_0 tau_{i}(A) E*_0 is not a multiple of E*_0", {"i": i})
        matrices.append(M)
        scalars.append(scalar)
    return matrices, scalars


def split_sequence(S: TriDiagonalSystem) -> List[FieldElement]:
    _, scalars = split_matrices(S)
    return [scalars[i] * dual_gap_product(S.theta_star, i) for i in range(S.d + 1)]


# --- parameter arrays ---

@dataclass(frozen=True)
class ParameterArray:
    theta: Tuple[FieldElement, ...]
    theta_star: Tuple[FieldElement, ...]
    zeta: Tuple[FieldElement, ...]

    def __post_init__(self):
        if not (len(self.theta) == len(self.theta_star) == len(self.zeta)) or not self.theta:
            raise DimensionMismatch(
                "theta, theta_star and zeta must have the same positive length",
                {"lengths": [len(self.theta), len(self.theta_star), len(self.zeta)]},
            )

    @property
    def d(self) -> int:
        return len(self.theta) - 1

    @property
    def field(self) -> FieldDescriptor:
        return self.theta[0].field

    def embed(self, target: FieldDescriptor) -> "ParameterArray":
        move = lambda xs: tuple(target.element(x) for x in xs)  # noqa: E731
        return ParameterArray(move(self.theta), move(self.theta_star), move(self.zeta))

    def to_json(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "theta": [str(x) for x in self.theta],
            "theta_star": [str(x) for x in self.theta_star],
            "zeta": [str(x) for x in self.zeta],
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any], field: Optional[FieldDescriptor] = None) -> "ParameterArray":
        if field is None:
            field = field_from_json(payload["field"])
        parse = lambda xs: tuple(field.parse(x) for x in xs)  # noqa: E731
        array = cls(parse(payload["theta"]), parse(payload["theta_star"]), parse(payload["zeta"]))
        if "d" in payload and payload["d"] != array.d:
            raise DimensionMismatch(f"declared d = {payload['d']} but sequences give d = {array.d}")
        return array


def ratio_values(theta: Sequence[FieldElement]) -> List[Optional[FieldElement]]:
    """(theta_{i-2} - theta_{i+1}) / (theta_{i-1} - theta_i) for 2 <= i <= d-1; None where undefined."""
    values = []
    for i in range(2, len(theta) - 1):
        gap = theta[i - 1] - theta[i]
        values.append(None if gap.is_zero() else (theta[i - 2] - theta[i + 1]) / gap)
    return values


def _ratio_terms(theta: Sequence[FieldElement]) -> List[Tuple[FieldElement, FieldElement]]:
    return [(theta[i - 2] - theta[i + 1], theta[i - 1] - theta[i]) for i in range(2, len(theta) - 1)]


def ratios_agree(*sequences: Sequence[FieldElement]) -> bool:
    """All ratios of all sequences are one common value, compared by cross-multiplication."""
    terms = [t for seq in sequences for t in _ratio_terms(seq)]
    if not terms:
        return True
    if any(den.is_zero() for _, den in terms):
        return False
    num0, den0 = terms[0]
    return all(num * den0 == num0 * den for num, den in terms[1:])


def eq_ineq_sum(P: ParameterArray) -> FieldElement:
    """sum_i eta_{d-i}(theta_0) eta*_{d-i}(theta*_0) zeta_i"""
    d = P.d
    total = P.field.zero()
    for i in range(d + 1):
        total = total + eta(P.theta, d - i)(P.theta[0]) * eta(P.theta_star, d - i)(P.theta_star[0]) * P.zeta[i]
    return total


def _distinct(values: Sequence[FieldElement]) -> Optional[Tuple[int, int]]:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j]:
                return i, j
    return None


@dataclass
class ConditionReport:
    condition_i: Verdict
    condition_ii: Verdict
    condition_iii: Verdict
    common_ratio: Optional[FieldElement] = None
    ineq_sum: Optional[FieldElement] = None
    reasons: Dict[str, Any] = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v is Verdict.PASS for v in (self.condition_i, self.condition_ii, self.condition_iii))

    def failed_conditions(self) -> List[str]:
        return [name for name, v in (("i", self.condition_i), ("ii", self.condition_ii), ("iii", self.condition_iii))
                if v is Verdict.FAIL]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "conditions": {"i": self.condition_i.value, "ii": self.condition_ii.value, "iii": self.condition_iii.value},
            "common_ratio": None if self.common_ratio is None else str(self.common_ratio),
            "ineq_sum": None if self.ineq_sum is None else str(self.ineq_sum),
            "reasons": self.reasons,
        }


def check_conjecture_conditions(P: ParameterArray) -> ConditionReport:
    """
    (i)   theta and theta_star each pairwise distinct
    (ii)  all ratios of both sequences equal one common value (vacuous for d <= 2)
    (iii) zeta_0 = 1, zeta_d != 0 and the weighted zeta sum is nonzero
    """
    reasons: Dict[str, Any] = {}

    collisions = {name: _distinct(seq) for name, seq in (("theta", P.theta), ("theta_star", P.theta_star))}
    collisions = {k: list(v) for k, v in collisions.items() if v is not None}
    condition_i = Verdict.FAIL if collisions else Verdict.PASS
    if collisions:
        reasons["i"] = {"repeated": collisions}

    condition_ii = Verdict.PASS if ratios_agree(P.theta, P.theta_star) else Verdict.FAIL
    values = [v for v in ratio_values(P.theta) + ratio_values(P.theta_star) if v is not None]
    common = values[0] if values and condition_ii is Verdict.PASS else None
    if condition_ii is Verdict.FAIL:
        reasons["ii"] = {
            "theta_ratios": [None if v is None else str(v) for v in ratio_values(P.theta)],
            "theta_star_ratios": [None if v is None else str(v) for v in ratio_values(P.theta_star)],
        }

    total = eq_ineq_sum(P)
    failures = []
    if not P.zeta[0].is_one():
        failures.append("zeta_0 != 1")
    if P.zeta[-1].is_zero():
        failures.append("zeta_d = 0")
    if total.is_zero():
        failures.append("sum vanishes")
    condition_iii = Verdict.FAIL if failures else Verdict.PASS
    if failures:
        reasons["iii"] = failures

    return ConditionReport(condition_i, condition_ii, condition_iii, common, total, reasons)


def extract_parameter_array(S: TriDiagonalSystem) -> ParameterArray:
    """The parameter array of a sharp system; a failed condition is a bug signal."""
    P = ParameterArray(tuple(S.theta), tuple(S.theta_star), tuple(split_sequence(S)))
    report = check_conjecture_conditions(P)
    if not report.passed:
        raise OnlyIfViolated(
            f"parameter array of a valid system fails condition(s) {report.failed_conditions()}",
            {"array": P.to_json(), "report": report.to_dict()},
        )
    return P
