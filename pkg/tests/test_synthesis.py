import random
from fractions import Fraction

import pytest

from engine.errors import DimensionMismatch, MixedFields, RepeatedEigenvalue, ZeroPhi
from engine.exactfield import RATIONAL_FIELD, prime_field, quadratic_extension
from engine.polynomial import MPolynomial, monomials_up_to_degree, parse_polynomial
from engine.synthesis import (
    classify_xi,
    construct_and_verify,
    construct_candidate,
    gh_values,
    mu_scalar_action,
    oracle_split_sequence,
    propose_phi,
    psi,
    solve_phi_for_zeta,
    sweep_phi,
    witness_polynomials,
    xi_from_zeta,
    zeta_from_xi,
)

QQ = RATIONAL_FIELD
GF13 = prime_field(13)


def seq(field, *values):
    return tuple(field.element(v) for v in values)


def test_candidate_reproduces_worked_pair(worked_pair):
    candidate = construct_candidate(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1))
    assert (candidate.A, candidate.Astar) == worked_pair
    assert candidate.d == 1


def test_candidate_input_errors():
    with pytest.raises(ZeroPhi):
        construct_candidate(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 0))
    with pytest.raises(RepeatedEigenvalue):
        construct_candidate(seq(QQ, 1, 1), seq(QQ, 0, 1), seq(QQ, 1))
    with pytest.raises(DimensionMismatch):
        construct_candidate(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1, 1))


def test_construct_and_verify_worked_pair():
    result = construct_and_verify(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1), seed=0)
    assert result.parameter_array.zeta == seq(QQ, 1, 1)
    assert result.phi_products_match
    assert result.system.theta == seq(QQ, 0, 1)
    payload = result.to_dict()
    assert payload["parameter_array"]["zeta"] == ["1", "1"]
    assert payload["phi_products_match"] is True


def test_diameter_one_zeta_is_phi():
    # for d = 1 the split sequence is (1, phi_1) whenever the candidate is irreducible
    for phi in (2, Fraction(-1, 3), 7):
        result = construct_and_verify(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, phi), seed=1)
        assert result.parameter_array.zeta == seq(QQ, 1, phi)


def test_propose_phi():
    assert propose_phi(seq(QQ, 0, 1), seq(QQ, 0, 1), 5) == seq(QQ, 5)
    assert propose_phi(seq(QQ, 0, 1, 3), seq(QQ, 0, 1, 3), 1) == seq(QQ, 1, -2)
    assert propose_phi(seq(QQ, 4), seq(QQ, 4), 1) == ()


def test_proposed_phi_builds_a_system():
    theta = theta_star = seq(QQ, 0, 1, 3)
    result = construct_and_verify(theta, theta_star, propose_phi(theta, theta_star, 1), seed=3)
    assert result.system.d == 2
    assert result.system.sharp
    assert oracle_split_sequence(result.system) == list(result.parameter_array.zeta)


def test_solve_phi_for_zeta():
    result = solve_phi_for_zeta(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1, 1), seed=0)
    assert result.candidate.phi == seq(QQ, 1)
    with pytest.raises(ZeroPhi):
        solve_phi_for_zeta(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1, 0))
    with pytest.raises(DimensionMismatch):
        solve_phi_for_zeta(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1))


def test_sweep_phi():
    # phi = -1 makes (theta_0 - theta_1, 1) a common eigenvector
    stats = sweep_phi(seq(QQ, 0, 1), seq(QQ, 0, 1), [-1, 0, 1, 2], seed=0)
    assert stats.total == 4
    assert stats.zero_phi == 1
    assert stats.accepted == 2
    assert stats.relation_confirmed == 2
    assert stats.oracle_mismatches == 0
    assert stats.to_dict()["rejected"] == {"iv": 1}


def test_zeta_xi_conversion():
    theta_star = seq(QQ, 0, 1, 3)
    xi = seq(QQ, 2, 5)
    zeta = zeta_from_xi(xi, theta_star)
    assert zeta == [1, -2, 15]
    assert xi_from_zeta(zeta, theta_star) == list(xi)
    with pytest.raises(DimensionMismatch):
        zeta_from_xi(seq(QQ, 1), theta_star)


def test_witness_polynomials_shape():
    g, h = witness_polynomials(seq(QQ, 0, 1, 3), seq(QQ, 0, 2, 5))
    assert g.degree() == 1 and h.degree() == 1
    assert psi(MPolynomial.constant(QQ, 2, 1), seq(QQ, 0, 1, 3), seq(QQ, 0, 2, 5)) == g * h
    with pytest.raises(DimensionMismatch):
        witness_polynomials(seq(QQ, 0), seq(QQ, 0))


def test_classify_xi_diameter_one():
    theta = theta_star = seq(QQ, 0, 1)
    assert gh_values(seq(QQ, -1), theta, theta_star) == (1, 2)
    assert classify_xi(seq(QQ, -1), theta, theta_star) == "condition_iii_holds"
    assert classify_xi(seq(QQ, 0), theta, theta_star) == "zeta_d_zero"
    assert classify_xi(seq(QQ, 1), theta, theta_star) == "sum_zero"


@pytest.mark.parametrize("field", [QQ, GF13])
def test_gh_values_match_zeta_identities(field):
    theta, theta_star = seq(field, 0, 1, 3, 7), seq(field, 1, 2, 5, 11)
    rng = random.Random(2024)
    outcomes = set()
    for _ in range(1000):
        xi = seq(field, *(Fraction(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(3)))
        g_value, h_value = gh_values(xi, theta, theta_star)
        assert g_value == zeta_from_xi(xi, theta_star)[-1]
        outcomes.add(classify_xi(xi, theta, theta_star))
    assert "condition_iii_holds" in outcomes


def test_mu_scalar_action_on_worked_pair(worked_pair):
    result = construct_and_verify(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1), seed=0)
    report = mu_scalar_action(result.system, parse_polynomial("x1", QQ, 1))
    assert report.passed
    assert report.xi == seq(QQ, -1)
    assert report.value == -1
    assert (report.g_value, report.h_value) == (1, 2)
    assert report.to_dict()["polynomial"] == "x1"


def test_mu_monomials_on_diameter_two():
    theta = theta_star = seq(QQ, 0, 1, 3)
    system = construct_and_verify(theta, theta_star, propose_phi(theta, theta_star, 1), seed=3).system
    for f in monomials_up_to_degree(QQ, 2, 3):
        report = mu_scalar_action(system, f)
        assert report.scalar_action_verified and report.commutativity_verified


def test_mu_scalar_action_field_handling():
    result = construct_and_verify(seq(QQ, 0, 1), seq(QQ, 0, 1), seq(QQ, 1), seed=0)
    with pytest.raises(DimensionMismatch):
        mu_scalar_action(result.system, parse_polynomial("x1*x2", QQ, 2))
    with pytest.raises(MixedFields):
        mu_scalar_action(result.system, parse_polynomial("x1", GF13, 1))
    lifted = result.system.lift(quadratic_extension(QQ, 2))
    assert mu_scalar_action(lifted, parse_polynomial("x1^2 + 1", QQ, 1)).passed
