import random
from dataclasses import replace

import pytest

from engine.errors import IndexOutOfRange, InvalidOrdering, NotATridiagonalPair, RepeatedEigenvalue
from engine.exactfield import RATIONAL_FIELD, quadratic_extension
from engine.exactlinalg import ExactMatrix
from engine.tdsystem import (
    Verdict,
    build_system,
    default_ordering,
    primitive_idempotent,
    standard_orderings,
    system_variants,
    t_module_relations,
    triple_product_vanishing,
    verify_td_pair,
)

QQ = RATIONAL_FIELD


@pytest.fixture
def krawtchouk_pair():
    """Spin-1 Leonard pair: A tridiagonal with eigenvalues 2, 0, -2 and A* = diag(2, 0, -2)."""
    A = ExactMatrix.from_rows(QQ, [[0, 2, 0], [1, 0, 1], [0, 2, 0]])
    Astar = ExactMatrix.diagonal(QQ, [2, 0, -2])
    return A, Astar


def test_worked_pair_passes_all_conditions(worked_pair):
    report = verify_td_pair(*worked_pair)
    assert report.passed
    assert {c: v.value for c, v in report.conditions.items()} == {"i": "pass", "ii": "pass", "iii": "pass", "iv": "pass"}
    assert report.diameter == report.dual_diameter == 1
    assert report.shape == [1, 1]
    assert report.sharp


def test_identity_pair_fails_irreducibility():
    I = ExactMatrix.identity(QQ, 2)
    report = verify_td_pair(I, I)
    assert report.conditions["i"] is Verdict.PASS
    assert report.conditions["iv"] is Verdict.FAIL
    assert report.witnesses["iv"]
    assert report.first_failure() == "iv"


def test_non_diagonalizable_skips_the_rest():
    A = ExactMatrix.from_rows(QQ, [[1, 1], [0, 1]])
    report = verify_td_pair(A, ExactMatrix.identity(QQ, 2))
    assert report.conditions["i"] is Verdict.FAIL
    assert report.witnesses["i"]["reason"] == "not diagonalizable"
    assert all(report.conditions[c] is Verdict.SKIPPED for c in ("ii", "iii", "iv"))


def test_eigenvalues_outside_field():
    A = ExactMatrix.from_rows(QQ, [[0, 2], [1, 0]])
    report = verify_td_pair(A, ExactMatrix.identity(QQ, 2))
    assert report.conditions["i"] is Verdict.FAIL
    assert report.witnesses["i"]["reason"] == "eigenvalues outside field"


def test_complete_adjacency_is_not_a_path():
    A = ExactMatrix.diagonal(QQ, [1, 2, 3])
    J = ExactMatrix.from_rows(QQ, [[1, 1, 1]] * 3)
    report = verify_td_pair(A, J)
    assert report.conditions["ii"] is Verdict.FAIL
    assert len(report.witnesses["ii"]["edges"]) == 3


def test_standard_orderings(krawtchouk_pair):
    pairs = standard_orderings(*krawtchouk_pair)
    assert len(pairs) == 4
    theta, theta_star = default_ordering(pairs)
    assert [str(t) for t in theta] == ["-2", "0", "2"]
    assert [str(t) for t in theta_star] == ["-2", "0", "2"]


def test_krawtchouk_system(krawtchouk_pair):
    S = build_system(*krawtchouk_pair)
    assert S.d == 2
    assert S.rho == (1, 1, 1)
    assert S.sharp
    assert triple_product_vanishing(S)
    assert all(t_module_relations(S).values())
    assert [E.rank() for E in S.E] == [E.rank() for E in S.E_star]


def test_corrupted_idempotent_breaks_vanishing(krawtchouk_pair):
    S = build_system(*krawtchouk_pair)
    noise = ExactMatrix.from_rows(QQ, [[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    C = replace(S, E_star=(S.E_star[0], S.E_star[1] + noise, S.E_star[2]))
    result = triple_product_vanishing(C)
    assert not result.holds
    assert result.failure == {"i": 1, "j": 0, "k": 0, "family": "E* A E*"}
    relations = t_module_relations(C)
    assert relations["e*_i a^k e*_j = 0 for k < |i-j|"] is False
    assert relations["e*_i e*_j = delta_ij e*_i"] is False
    # the E side is untouched
    assert relations["e_i a*^k e_j = 0 for k < |i-j|"] is True
    assert relations["e_i e_j = delta_ij e_i"] is True


def test_reversal_and_variants(krawtchouk_pair):
    S = build_system(*krawtchouk_pair)
    R = S.reversed(theta=True, theta_star=True)
    assert R.theta == S.theta[::-1]
    assert R.E_star[0] == S.E_star[-1]
    variants = system_variants(*krawtchouk_pair)
    assert len(variants) == 4
    assert all(triple_product_vanishing(V) for V in variants)


def test_explicit_choice(krawtchouk_pair):
    S = build_system(*krawtchouk_pair, choice=(["2", "0", "-2"], [-2, 0, 2]))
    assert [str(t) for t in S.theta] == ["2", "0", "-2"]
    with pytest.raises(InvalidOrdering):
        build_system(*krawtchouk_pair, choice=([0, -2, 2], [-2, 0, 2]))


def test_build_rejects_reducible_pair():
    I = ExactMatrix.identity(QQ, 2)
    with pytest.raises(NotATridiagonalPair):
        build_system(I, I)


def test_conjugation_preserves_identities(krawtchouk_pair):
    S = build_system(*krawtchouk_pair)
    P = ExactMatrix.random_invertible(QQ, 3, random.Random(7))
    C = S.conjugate(P)
    assert C.A == S.A.conjugate_by(P)
    assert triple_product_vanishing(C)
    assert all(t_module_relations(C).values())
    assert verify_td_pair(C.A, C.Astar).passed


def test_lift_to_extension(krawtchouk_pair):
    S = build_system(*krawtchouk_pair)
    K = quadratic_extension(QQ, 5)
    L = S.lift(K)
    assert L.field == K
    assert L.theta == tuple(K.element(t) for t in S.theta)
    assert all(t_module_relations(L).values())


def test_primitive_idempotent_errors(krawtchouk_pair):
    A, _ = krawtchouk_pair
    with pytest.raises(IndexOutOfRange):
        primitive_idempotent(A, [QQ.element(2), QQ.zero()], 5)
    with pytest.raises(RepeatedEigenvalue):
        primitive_idempotent(A, [QQ.element(2), QQ.element(2)], 0)
