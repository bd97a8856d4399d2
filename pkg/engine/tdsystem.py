"""
Tridiagonal Pairs and Systems

Recognition and validation of tridiagonal pairs (A, A*): primitive idempotents,
standard orderings, the four defining conditions, shape and sharpness, and
the vanishing identities E_i A*^k E_j = 0 for k < |i - j|.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from engine.errors import (
    DimensionMismatch,
    EigenvalueSearchFailed,
    IndexOutOfRange,
    InvalidOrdering,
    InvariantViolation,
    MixedFields,
    NotAPath,
    NotATridiagonalPair,
    NotDiagonalizable,
    RepeatedEigenvalue,
)
from engine.exactfield import FieldDescriptor, FieldElement
from engine.exactlinalg import (
    EigenDecomposition,
    ExactMatrix,
    eigen_decompose,
    is_irreducible_pair,
)
from engine.logger import debug, log

Ordering = Tuple[FieldElement, ...]
OrderingPair = Tuple[Ordering, Ordering]


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


def primitive_idempotent(M: ExactMatrix, eigenvalues: Sequence[FieldElement], i: int) -> ExactMatrix:
    """E_i = prod_{j != i} (M - t_j I) / (t_i - t_j)"""
    if not 0 <= i < len(eigenvalues):
        raise IndexOutOfRange(f"index {i} outside 0..{len(eigenvalues) - 1}")
    I = ExactMatrix.identity(M.field, M.rows)
    E = I
    theta_i = eigenvalues[i]
    for j, theta_j in enumerate(eigenvalues):
        if j == i:
            continue
        gap = theta_i - theta_j
        if gap.is_zero():
            raise RepeatedEigenvalue(f"eigenvalue {theta_i} appears at positions {i} and {j}", {"i": i, "j": j})
        E = E @ ((M - I * theta_j) * gap.inverse())
    return E


def idempotents(M: ExactMatrix, eigenvalues: Sequence[FieldElement]) -> List[ExactMatrix]:
    return [primitive_idempotent(M, eigenvalues, i) for i in range(len(eigenvalues))]


def ordering_key(pair: OrderingPair) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    return tuple(str(t) for t in pair[0]), tuple(str(t) for t in pair[1])


def _path_orderings(M: ExactMatrix, other: ExactMatrix, decomposition: EigenDecomposition, name: str) -> List[Ordering]:
    """
    Orderings of M's eigenvalues under which `other` acts tridiagonally.
    Adjacent eigenvalues are those with E_i other E_j != 0 in either order; the
    resulting graph must be a simple path, traversed from each end.
    """
    eigenvalues = list(decomposition.eigenvalues)
    m = len(eigenvalues)
    if m == 1:
        return [tuple(eigenvalues)]
    E = idempotents(M, eigenvalues)
    neighbours: Dict[int, List[int]] = {i: [] for i in range(m)}
    edges = []
    for i in range(m):
        for j in range(i + 1, m):
            if not (E[i] @ other @ E[j]).is_zero() or not (E[j] @ other @ E[i]).is_zero():
                neighbours[i].append(j)
                neighbours[j].append(i)
                edges.append((str(eigenvalues[i]), str(eigenvalues[j])))
    ends = [i for i in range(m) if len(neighbours[i]) == 1]
    details = {"operator": name, "edges": edges}
    if len(edges) != m - 1 or len(ends) != 2 or any(len(v) > 2 for v in neighbours.values()):
        raise NotAPath(f"eigenspace adjacency graph of {name} is not a simple path", details)
    orderings = []
    for start in ends:
        walk, previous = [start], None
        while len(walk) < m:
            step = [k for k in neighbours[walk[-1]] if k != previous]
            if not step:
                raise NotAPath(f"eigenspace adjacency graph of {name} is disconnected", details)
            previous = walk[-1]
            walk.append(step[0])
        orderings.append(tuple(eigenvalues[k] for k in walk))
    return orderings


def _check_pair_shape(A: ExactMatrix, Astar: ExactMatrix) -> None:
    if A.field != Astar.field:
        raise MixedFields(f"A is over {A.field} but A* is over {Astar.field}")
    if not A.is_square() or A.shape != Astar.shape:
        raise DimensionMismatch(f"A {A.shape} and A* {Astar.shape} must be square of equal size")


def standard_orderings(A: ExactMatrix, Astar: ExactMatrix) -> List[OrderingPair]:
    """Every (ordering of A-eigenvalues, ordering of A*-eigenvalues) pair that is standard, sorted."""
    _check_pair_shape(A, Astar)
    decomposition = _diagonalize(A, "A")
    dual = _diagonalize(Astar, "A*")
    theta_orders = _path_orderings(A, Astar, decomposition, "A")
    theta_star_orders = _path_orderings(Astar, A, dual, "A*")
    pairs = [(t, ts) for t in theta_orders for ts in theta_star_orders]
    return sorted(pairs, key=ordering_key)


def default_ordering(pairs: Sequence[OrderingPair]) -> OrderingPair:
    """The lexicographically smallest candidate by eigenvalue-sequence serialization."""
    if not pairs:
        raise InvalidOrdering("no standard ordering to choose from")
    return min(pairs, key=ordering_key)


def _diagonalize(M: ExactMatrix, name: str) -> EigenDecomposition:
    decomposition = eigen_decompose(M)
    if not decomposition.diagonalizable:
        raise NotDiagonalizable(f"{name} is not diagonalizable over {M.field}", decomposition.to_dict())
    return decomposition


# --- validation ---

CONDITIONS = ("i", "ii", "iii", "iv")


@dataclass
class ValidationReport:
    conditions: Dict[str, Verdict] = dc_field(default_factory=lambda: {c: Verdict.SKIPPED for c in CONDITIONS})
    witnesses: Dict[str, Any] = dc_field(default_factory=dict)
    diameter: Optional[int] = None
    dual_diameter: Optional[int] = None
    shape: Optional[List[int]] = None
    sharp: Optional[bool] = None
    irreducibility: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return all(v is Verdict.PASS for v in self.conditions.values())

    def first_failure(self) -> Optional[str]:
        return next((c for c in CONDITIONS if self.conditions[c] is Verdict.FAIL), None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "conditions": {c: v.value for c, v in self.conditions.items()},
            "witnesses": self.witnesses,
            "diameter": self.diameter,
            "dual_diameter": self.dual_diameter,
            "shape": self.shape,
            "sharp": self.sharp,
            "irreducibility": self.irreducibility,
        }


def verify_td_pair(A: ExactMatrix, Astar: ExactMatrix, seed: Optional[Any] = None) -> ValidationReport:
    """
    Check the four defining conditions of a tridiagonal pair:
    (i) A and A* diagonalizable, (ii) A* tridiagonal on some ordering of A's
    eigenspaces, (iii) the same with roles swapped, (iv) no common proper
    invariant subspace. Conditions after a failed (i) are skipped.
    Inconclusive from the irreducibility test propagates.
    """
    _check_pair_shape(A, Astar)
    report = ValidationReport()

    decompositions = {}
    for name, M in (("A", A), ("A*", Astar)):
        try:
            decompositions[name] = eigen_decompose(M)
        except EigenvalueSearchFailed as e:
            report.conditions["i"] = Verdict.FAIL
            report.witnesses["i"] = {"operator": name, "reason": "eigenvalues outside field", "details": e.details}
            return report
        if not decompositions[name].diagonalizable:
            report.conditions["i"] = Verdict.FAIL
            report.witnesses["i"] = {"operator": name, "reason": "not diagonalizable",
                                     "details": decompositions[name].to_dict()}
            return report
    report.conditions["i"] = Verdict.PASS
    report.diameter = len(decompositions["A"].eigenvalues) - 1
    report.dual_diameter = len(decompositions["A*"].eigenvalues) - 1

    orderings: Dict[str, List[Ordering]] = {}
    for condition, name, M, other in (("ii", "A", A, Astar), ("iii", "A*", Astar, A)):
        try:
            orderings[condition] = _path_orderings(M, other, decompositions[name], name)
            report.conditions[condition] = Verdict.PASS
        except NotAPath as e:
            report.conditions[condition] = Verdict.FAIL
            report.witnesses[condition] = e.details

    irreducibility = is_irreducible_pair(A, Astar, seed=seed)
    report.irreducibility = irreducibility.to_dict()
    if irreducibility.irreducible:
        report.conditions["iv"] = Verdict.PASS
    else:
        report.conditions["iv"] = Verdict.FAIL
        report.witnesses["iv"] = irreducibility.witness.to_strings()

    if report.passed:
        if report.diameter != report.dual_diameter:
            raise InvariantViolation(
                "diameter mismatch on a pair passing all four conditions",
                {"d": report.diameter, "delta": report.dual_diameter},
            )
        theta = default_ordering([(t, ts) for t in orderings["ii"] for ts in orderings["iii"]])[0]
        report.shape = [primitive_idempotent(A, theta, i).rank() for i in range(len(theta))]
        report.sharp = report.shape[0] == 1
    debug(f"🔍 verify_td_pair: {', '.join(f'{c}={v.value}' for c, v in report.conditions.items())}")
    return report


# --- systems ---

@dataclass(frozen=True)
class TriDiagonalSystem:
    A: ExactMatrix
    Astar: ExactMatrix
    theta: Tuple[FieldElement, ...]
    theta_star: Tuple[FieldElement, ...]
    E: Tuple[ExactMatrix, ...]
    E_star: Tuple[ExactMatrix, ...]
    rho: Tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.theta) - 1

    @property
    def field(self) -> FieldDescriptor:
        return self.A.field

    @property
    def dimension(self) -> int:
        return self.A.rows

    @property
    def sharp(self) -> bool:
        return self.rho[0] == 1

    def conjugate(self, P: ExactMatrix) -> "TriDiagonalSystem":
        """Simultaneous basis change M -> P^-1 M P on every matrix."""
        P_inv = P.inverse()
        move = lambda M: P_inv @ M @ P  # noqa: E731
        return replace(
            self,
            A=move(self.A),
            Astar=move(self.Astar),
            E=tuple(move(E) for E in self.E),
            E_star=tuple(move(E) for E in self.E_star),
        )

    def lift(self, target: FieldDescriptor) -> "TriDiagonalSystem":
        """The same system with every matrix and scalar embedded into an extension field."""
        return TriDiagonalSystem(
            A=self.A.embed(target),
            Astar=self.Astar.embed(target),
            theta=tuple(target.element(t) for t in self.theta),
            theta_star=tuple(target.element(t) for t in self.theta_star),
            E=tuple(E.embed(target) for E in self.E),
            E_star=tuple(E.embed(target) for E in self.E_star),
            rho=self.rho,
        )

    def reversed(self, theta: bool = True, theta_star: bool = False) -> "TriDiagonalSystem":
        """Reverse the eigenvalue ordering and/or the dual one."""
        result = self
        if theta:
            result = replace(result, theta=result.theta[::-1], E=result.E[::-1], rho=result.rho[::-1])
        if theta_star:
            result = replace(result, theta_star=result.theta_star[::-1],
                             E_star=result.E_star[::-1])
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "field": self.field.to_json(),
            "theta": [str(t) for t in self.theta],
            "theta_star": [str(t) for t in self.theta_star],
            "shape": list(self.rho),
            "sharp": self.sharp,
        }


def _check_system_invariants(S: TriDiagonalSystem) -> None:
    """Raise InvariantViolation naming the first identity that fails."""
    I = ExactMatrix.identity(S.field, S.dimension)
    d = S.d
    for label, M, theta, E, other in (("", S.A, S.theta, S.E, S.Astar), ("*", S.Astar, S.theta_star, S.E_star, S.A)):
        total = E[0]
        spectral = E[0] * theta[0]
        for i in range(1, d + 1):
            total = total + E[i]
            spectral = spectral + E[i] * theta[i]
        if total != I:
            raise InvariantViolation(f"sum of E{label}_i is not the identity", {"identity": f"sum E{label}_i = I"})
        if spectral != M:
            raise InvariantViolation(f"A{label} != sum theta{label}_i E{label}_i", {"identity": f"A{label} = sum theta{label}_i E{label}_i"})
        for i in range(d + 1):
            for j in range(d + 1):
                product = E[i] @ E[j]
                expected = E[i] if i == j else ExactMatrix.zeros(S.field, S.dimension, S.dimension)
                if product != expected:
                    raise InvariantViolation(f"E{label}_{i} E{label}_{j} != delta_ij E{label}_{i}",
                                             {"identity": f"E{label}_i E{label}_j = delta_ij E{label}_i", "i": i, "j": j})
                if abs(i - j) > 1 and not (E[i] @ other @ E[j]).is_zero():
                    raise InvariantViolation(f"E{label}_{i} A E{label}_{j} != 0 for |i-j| > 1",
                                             {"identity": "standardness", "i": i, "j": j})
    dual_ranks = [E.rank() for E in S.E_star]
    if list(S.rho) != dual_ranks:
        raise InvariantViolation("rank(E_i) != rank(E*_i)", {"identity": "rank(E_i) = rank(E*_i)", "rho": list(S.rho), "rho_star": dual_ranks})
    if list(S.rho) != list(S.rho[::-1]):
        raise InvariantViolation("shape is not symmetric", {"identity": "rho_i = rho_{d-i}", "rho": list(S.rho)})
    for i in range(1, d // 2 + 1):
        if S.rho[i - 1] > S.rho[i]:
            raise InvariantViolation("shape is not unimodal", {"identity": "rho_{i-1} <= rho_i", "rho": list(S.rho)})


def _as_ordering(field: FieldDescriptor, values: Sequence[Any]) -> Ordering:
    return tuple(field.element(v) for v in values)


def build_system(A: ExactMatrix, Astar: ExactMatrix, choice: Optional[Tuple[Sequence[Any], Sequence[Any]]] = None,
                 verify: bool = True, seed: Optional[Any] = None) -> TriDiagonalSystem:
    """
    Bundle a tridiagonal pair with a standard ordering of both idempotent families.
    `choice` defaults to the lexicographically smallest standard ordering pair.
    """
    if verify:
        report = verify_td_pair(A, Astar, seed=seed)
        if not report.passed:
            raise NotATridiagonalPair(f"condition ({report.first_failure()}) fails", report.to_dict())
    pairs = standard_orderings(A, Astar)
    if choice is None:
        theta, theta_star = default_ordering(pairs)
    else:
        theta, theta_star = _as_ordering(A.field, choice[0]), _as_ordering(A.field, choice[1])
        if (theta, theta_star) not in pairs:
            raise InvalidOrdering(
                "requested ordering is not standard",
                {"theta": [str(t) for t in theta], "theta_star": [str(t) for t in theta_star]},
            )
    E = tuple(idempotents(A, theta))
    E_star = tuple(idempotents(Astar, theta_star))
    system = TriDiagonalSystem(A, Astar, theta, theta_star, E, E_star, tuple(E_i.rank() for E_i in E))
    _check_system_invariants(system)
    log(f"✅ Built tridiagonal system with d={system.d}, shape={list(system.rho)}", "debug")
    return system


def system_variants(A: ExactMatrix, Astar: ExactMatrix, seed: Optional[Any] = None) -> List[TriDiagonalSystem]:
    """The (up to four) systems from standard orderings and their reversals."""
    report = verify_td_pair(A, Astar, seed=seed)
    if not report.passed:
        raise NotATridiagonalPair(f"condition ({report.first_failure()}) fails", report.to_dict())
    return [build_system(A, Astar, choice, verify=False) for choice in standard_orderings(A, Astar)]


# --- vanishing identities ---

@dataclass(frozen=True)
class VanishingResult:
    holds: bool
    failure: Optional[Dict[str, Any]] = None

    def __bool__(self):
        return self.holds


def _vanishing_failure(E: Sequence[ExactMatrix], M: ExactMatrix, family: str) -> Optional[Dict[str, Any]]:
    d = len(E) - 1
    power = ExactMatrix.identity(M.field, M.rows)
    for k in range(d):
        for i in range(d + 1):
            for j in range(d + 1):
                if k < abs(i - j) and not (E[i] @ power @ E[j]).is_zero():
                    return {"i": i, "j": j, "k": k, "family": family}
        power = power @ M
    return None


def triple_product_vanishing(S: TriDiagonalSystem) -> VanishingResult:
    """E_i A*^k E_j = 0 and E*_i A^k E*_j = 0 whenever k < |i - j|."""
    for E, M, family in ((S.E, S.Astar, "E A* E"), (S.E_star, S.A, "E* A E*")):
        failure = _vanishing_failure(E, M, family)
        if failure is not None:
            return VanishingResult(False, failure)
    return VanishingResult(True)


def t_module_relations(S: TriDiagonalSystem) -> Dict[str, bool]:
    """Each defining relation of the algebra T, checked on the concrete module."""
    n, field = S.dimension, S.field
    I = ExactMatrix.identity(field, n)
    relations = {}
    for label, M, theta, E in (("", S.A, S.theta, S.E), ("*", S.Astar, S.theta_star, S.E_star)):
        orthogonal = all(
            (E[i] @ E[j]) == (E[i] if i == j else ExactMatrix.zeros(field, n, n))
            for i in range(S.d + 1) for j in range(S.d + 1)
        )
        total = E[0]
        spectral = E[0] * theta[0]
        for i in range(1, S.d + 1):
            total = total + E[i]
            spectral = spectral + E[i] * theta[i]
        relations[f"e{label}_i e{label}_j = delta_ij e{label}_i"] = orthogonal
        relations[f"sum e{label}_i = 1"] = total == I
        relations[f"a{label} = sum theta{label}_i e{label}_i"] = spectral == M
    relations["e_i a*^k e_j = 0 for k < |i-j|"] = _vanishing_failure(S.E, S.Astar, "E A* E") is None
    relations["e*_i a^k e*_j = 0 for k < |i-j|"] = _vanishing_failure(S.E_star, S.A, "E* A E*") is None
    return relations
