"""
Candidate Construction and mu-Witness Checks

Split-basis candidates: A lower bidiagonal (diagonal theta, subdiagonal 1) and
A* upper bidiagonal (diagonal theta*, superdiagonal phi). Every candidate goes
through full tridiagonal-pair verification before it is trusted.

The witness side replays, on a concrete sharp system, how x_i acts on E*_0 V
as the scalar xi_i, and evaluates the polynomials

    g = eta*_d(theta*_0) x_d
    h = eta*_d(theta*_0) (eta_d(theta_0) + sum_i eta_{d-i}(theta_0) x_i)

whose values at xi are zeta_d and the weighted zeta sum.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from engine.errors import (
    ActionMismatch,
    CandidateRejected,
    DimensionMismatch,
    IdentityViolated,
    Inconclusive,
    InvalidOrdering,
    InvariantViolation,
    MixedFields,
    RelationNotConfirmed,
    RepeatedEigenvalue,
    ZeroPhi,
)
from engine.exactfield import FieldDescriptor, FieldElement, embed
from engine.exactlinalg import ExactMatrix
from engine.logger import debug
from engine.paramarray import (
    ParameterArray,
    dual_gap_product,
    eq_ineq_sum,
    eta,
    extract_parameter_array,
    split_matrices,
    tau,
)
from engine.polynomial import MPolynomial
from engine.settings import get_setting
from engine.tdsystem import TriDiagonalSystem, build_system, verify_td_pair


@dataclass(frozen=True)
class SplitBasisCandidate:
    theta: Tuple[FieldElement, ...]
    theta_star: Tuple[FieldElement, ...]
    phi: Tuple[FieldElement, ...]
    A: ExactMatrix
    Astar: ExactMatrix

    @property
    def d(self) -> int:
        return len(self.theta) - 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta": [str(t) for t in self.theta],
            "theta_star": [str(t) for t in self.theta_star],
            "phi": [str(p) for p in self.phi],
            "A": self.A.to_strings(),
            "Astar": self.Astar.to_strings(),
        }


def _check_distinct(values: Sequence[FieldElement], name: str) -> None:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j]:
                raise RepeatedEigenvalue(f"{name}_{i} = {name}_{j} = {values[i]}", {"sequence": name, "i": i, "j": j})


def construct_candidate(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement],
                        phi: Sequence[FieldElement]) -> SplitBasisCandidate:
    d = len(theta) - 1
    if d < 0 or len(theta_star) != d + 1 or len(phi) != d:
        raise DimensionMismatch(
            "need d+1 values of theta and theta_star and d values of phi",
            {"theta": len(theta), "theta_star": len(theta_star), "phi": len(phi)},
        )
    field = theta[0].field
    theta = tuple(field.element(t) for t in theta)
    theta_star = tuple(field.element(t) for t in theta_star)
    phi = tuple(field.element(p) for p in phi)
    for i, p in enumerate(phi, start=1):
        if p.is_zero():
            raise ZeroPhi(f"phi_{i} = 0", {"i": i})
    _check_distinct(theta, "theta")
    _check_distinct(theta_star, "theta_star")

    zero, one = field.zero(), field.one()
    n = d + 1
    A = [[zero] * n for _ in range(n)]
    Astar = [[zero] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = theta[i]
        Astar[i][i] = theta_star[i]
        if i + 1 < n:
            A[i + 1][i] = one
            Astar[i][i + 1] = phi[i]
    return SplitBasisCandidate(theta, theta_star, phi, ExactMatrix(field, A), ExactMatrix(field, Astar))


@dataclass(frozen=True)
class ConstructionResult:
    candidate: SplitBasisCandidate
    system: TriDiagonalSystem
    parameter_array: ParameterArray

    @property
    def phi_products_match(self) -> bool:
        """Empirical flag: zeta_i equals phi_1 ... phi_i for every i."""
        product = self.system.field.one()
        for i in range(1, self.candidate.d + 1):
            product = product * self.candidate.phi[i - 1]
            if self.parameter_array.zeta[i] != product:
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "candidate": self.candidate.to_dict(),
            "system": self.system.to_dict(),
            "parameter_array": self.parameter_array.to_json(),
            "phi_products_match": self.phi_products_match,
        }


def construct_and_verify(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement],
                         phi: Sequence[FieldElement], seed: Optional[Any] = None) -> ConstructionResult:
    """
    Build the split-basis candidate, verify it, bundle it as a system in the
    candidate's own ordering and extract its parameter array. A random basis
    change must leave the parameter array unchanged.
    """
    candidate = construct_candidate(theta, theta_star, phi)
    seed = get_setting("seed", 0) if seed is None else seed
    report = verify_td_pair(candidate.A, candidate.Astar, seed=seed)
    if not report.passed:
        condition = report.first_failure()
        raise CandidateRejected(f"candidate fails condition ({condition})", condition, report.to_dict())
    try:
        system = build_system(candidate.A, candidate.Astar, (candidate.theta, candidate.theta_star), verify=False)
    except InvalidOrdering as e:
        raise CandidateRejected("candidate ordering is not standard", "ordering", e.details)
    parameter_array = extract_parameter_array(system)

    rng = random.Random(f"{seed}:{[str(p) for p in candidate.phi]}")
    P = ExactMatrix.random_invertible(system.field, system.dimension, rng)
    if extract_parameter_array(system.conjugate(P)) != parameter_array:
        raise InvariantViolation("parameter array changed under a basis change",
                                 {"identity": "isomorphism invariance", "phi": [str(p) for p in candidate.phi]})
    return ConstructionResult(candidate, system, parameter_array)


def propose_phi(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement],
                phi1: FieldElement) -> Tuple[FieldElement, ...]:
    """
    The superdiagonal forced by the split-basis relations once phi_1 is fixed:

        phi_i = p1 * sum_{h<i} (theta_h - theta_{d-h}) / (theta_0 - theta_d)
                + (theta*_i - theta*_0)(theta_{i-1} - theta_d)
        p1    = phi_1 - (theta*_1 - theta*_0)(theta_0 - theta_d)

    Only a proposal; construct_and_verify decides.
    """
    d = len(theta) - 1
    if d == 0:
        return ()
    span = theta[0] - theta[d]
    if span.is_zero():
        raise RepeatedEigenvalue("theta_0 = theta_d", {"i": 0, "j": d})
    phi1 = theta[0].field.element(phi1)
    p1 = phi1 - (theta_star[1] - theta_star[0]) * span
    phi = []
    weight = theta[0].field.zero()
    for i in range(1, d + 1):
        weight = weight + (theta[i - 1] - theta[d - i + 1]) / span
        phi.append(p1 * weight + (theta_star[i] - theta_star[0]) * (theta[i - 1] - theta[d]))
    return tuple(phi)


def solve_phi_for_zeta(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement],
                       zeta: Sequence[FieldElement], seed: Optional[Any] = None) -> ConstructionResult:
    """phi_i = zeta_i / zeta_{i-1}, accepted only if the rebuilt system gives back zeta."""
    if len(zeta) != len(theta):
        raise DimensionMismatch("zeta must have d+1 entries")
    phi = []
    for i in range(1, len(zeta)):
        if zeta[i - 1].is_zero() or zeta[i].is_zero():
            raise ZeroPhi(f"zeta_{i} / zeta_{i - 1} is zero or undefined", {"i": i})
        phi.append(zeta[i] / zeta[i - 1])
    result = construct_and_verify(theta, theta_star, phi, seed)
    if tuple(result.parameter_array.zeta) != tuple(zeta):
        raise RelationNotConfirmed(
            "rebuilt candidate does not reproduce the target split sequence",
            {"target": [str(z) for z in zeta], "obtained": [str(z) for z in result.parameter_array.zeta]},
        )
    return result


def oracle_split_sequence(S: TriDiagonalSystem) -> List[FieldElement]:
    """zeta from E*_0 tau_i(A) E*_0 evaluated from scratch for every i."""
    E0 = S.E_star[0]
    zeta = []
    for i in range(S.d + 1):
        M = E0 @ tau(S.theta, i).evaluate_matrix(S.A) @ E0
        scalar = M.scalar_multiple_of(E0)
        zeta.append(None if scalar is None else scalar * dual_gap_product(S.theta_star, i))
    return zeta


@dataclass
class SweepStatistics:
    total: int = 0
    accepted: int = 0
    zero_phi: int = 0
    inconclusive: int = 0
    relation_confirmed: int = 0
    oracle_mismatches: int = 0
    rejected: Counter = dc_field(default_factory=Counter)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "zero_phi": self.zero_phi,
            "inconclusive": self.inconclusive,
            "relation_confirmed": self.relation_confirmed,
            "oracle_mismatches": self.oracle_mismatches,
            "rejected": dict(sorted(self.rejected.items())),
        }


def sweep_phi(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement],
              grid: Sequence[Any], seed: Optional[Any] = None) -> SweepStatistics:
    """Try every phi in grid^d and tally the outcomes."""
    field = theta[0].field
    values = [field.element(v) for v in grid]
    stats = SweepStatistics()
    for phi in itertools.product(values, repeat=len(theta) - 1):
        stats.total += 1
        try:
            result = construct_and_verify(theta, theta_star, phi, seed)
        except ZeroPhi:
            stats.zero_phi += 1
            continue
        except CandidateRejected as e:
            stats.rejected[e.condition] += 1
            continue
        except Inconclusive:
            stats.inconclusive += 1
            continue
        stats.accepted += 1
        stats.relation_confirmed += result.phi_products_match
        stats.oracle_mismatches += oracle_split_sequence(result.system) != list(result.parameter_array.zeta)
    debug(f"🔍 phi sweep: {stats.accepted}/{stats.total} accepted")
    return stats


# --- mu witnesses ---

def zeta_from_xi(xi: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> List[FieldElement]:
    """zeta_0 = 1, zeta_i = xi_i (theta*_0 - theta*_1)...(theta*_0 - theta*_i)"""
    if len(xi) != len(theta_star) - 1:
        raise DimensionMismatch(f"{len(xi)} values of xi for d = {len(theta_star) - 1}")
    return [theta_star[0].field.one()] + [xi[i - 1] * dual_gap_product(theta_star, i) for i in range(1, len(theta_star))]


def xi_from_zeta(zeta: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> List[FieldElement]:
    return [zeta[i] / dual_gap_product(theta_star, i) for i in range(1, len(theta_star))]


def witness_polynomials(theta: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> Tuple[MPolynomial, MPolynomial]:
    d = len(theta) - 1
    if d < 1 or len(theta_star) != d + 1:
        raise DimensionMismatch("witness polynomials need d >= 1 and sequences of equal length")
    field = theta[0].field
    x = MPolynomial.variables(field, d)
    scale = eta(theta_star, d)(theta_star[0])
    g = x[d - 1] * scale
    inner = MPolynomial.constant(field, d, eta(theta, d)(theta[0]))
    for i in range(1, d + 1):
        inner = inner + x[i - 1] * eta(theta, d - i)(theta[0])
    return g, inner * scale


def psi(f: MPolynomial, theta: Sequence[FieldElement], theta_star: Sequence[FieldElement]) -> MPolynomial:
    """f g h"""
    g, h = witness_polynomials(theta, theta_star)
    return f * g * h


def gh_values(xi: Sequence[FieldElement], theta: Sequence[FieldElement],
              theta_star: Sequence[FieldElement]) -> Tuple[FieldElement, FieldElement]:
    """(g(xi), h(xi)), checked against zeta_d and the weighted zeta sum."""
    _check_distinct(theta, "theta")
    _check_distinct(theta_star, "theta_star")
    g, h = witness_polynomials(theta, theta_star)
    g_value, h_value = g.evaluate(xi), h.evaluate(xi)
    zeta = zeta_from_xi(xi, theta_star)
    expected_sum = eq_ineq_sum(ParameterArray(tuple(theta), tuple(theta_star), tuple(zeta)))
    if g_value != zeta[-1]:
        raise IdentityViolated("g(xi) != zeta_d", {"g": str(g_value), "zeta_d": str(zeta[-1])})
    if h_value != expected_sum:
        raise IdentityViolated("h(xi) != weighted zeta sum", {"h": str(h_value), "sum": str(expected_sum)})
    return g_value, h_value


def classify_xi(xi: Sequence[FieldElement], theta: Sequence[FieldElement],
                theta_star: Sequence[FieldElement]) -> str:
    """Which way psi vanishes or survives at xi."""
    g_value, h_value = gh_values(xi, theta, theta_star)
    if g_value.is_zero():
        return "zeta_d_zero"
    if h_value.is_zero():
        return "sum_zero"
    return "condition_iii_holds"


@dataclass(frozen=True)
class MuWitnessReport:
    xi: Tuple[FieldElement, ...]
    polynomial: MPolynomial
    value: FieldElement
    scalar_action_verified: bool
    commutativity_verified: bool
    g_value: Optional[FieldElement] = None
    h_value: Optional[FieldElement] = None

    @property
    def passed(self) -> bool:
        return self.scalar_action_verified and self.commutativity_verified

    def to_dict(self) -> Dict[str, Any]:
        return {
            "xi": [str(x) for x in self.xi],
            "polynomial": str(self.polynomial),
            "value": str(self.value),
            "scalar_action_verified": self.scalar_action_verified,
            "commutativity_verified": self.commutativity_verified,
            "g_value": None if self.g_value is None else str(self.g_value),
            "h_value": None if self.h_value is None else str(self.h_value),
        }


def _polynomial_over(f: MPolynomial, field: FieldDescriptor) -> MPolynomial:
    if f.field == field:
        return f
    if not field.extends(f.field):
        raise MixedFields(f"polynomial over {f.field} cannot act on a system over {field}")
    return MPolynomial(field, f.num_variables, {k: embed(v, field) for k, v in f.terms.items()})


def mu_scalar_action(S: TriDiagonalSystem, f: MPolynomial, strict: bool = True) -> MuWitnessReport:
    """
    Substitute M_i = E*_0 tau_i(A) E*_0 for x_i in f and compare with
    f(xi_1, ..., xi_d) E*_0; the M_i must also commute pairwise.
    """
    matrices, scalars = split_matrices(S)
    matrices, xi = matrices[1:], tuple(scalars[1:])
    if f.num_variables != S.d:
        raise DimensionMismatch(f"polynomial in {f.num_variables} variables for d = {S.d}")
    f = _polynomial_over(f, S.field)
    commuting = all((M @ N) == (N @ M) for M, N in itertools.combinations(matrices, 2))
    E0 = S.E_star[0]
    value = f.evaluate(xi)
    verified = f.evaluate_matrices(matrices, E0) == E0 * value
    g_value = h_value = None
    if S.d >= 1:
        g_value, h_value = gh_values(xi, S.theta, S.theta_star)
    report = MuWitnessReport(xi, f, value, verified, commuting, g_value, h_value)
    if strict and not report.passed:
        raise ActionMismatch(f"mu({f}) does not act on E*_0 V as {value} times the identity", report.to_dict())
    return report
