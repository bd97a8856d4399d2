import random
from dataclasses import replace

import pytest

from engine.errors import DimensionMismatch, IndexOutOfRange, NotSharp
from engine.exactfield import RATIONAL_FIELD, quadratic_extension
from engine.exactlinalg import ExactMatrix
from engine.paramarray import (
    MonicShiftProduct,
    ParameterArray,
    check_conjecture_conditions,
    dual_gap_product,
    eq_ineq_sum,
    eta,
    extract_parameter_array,
    ratio_values,
    ratios_agree,
    split_matrices,
    split_sequence,
    tau,
    tau_eta_build,
)
from engine.tdsystem import Verdict, build_system

QQ = RATIONAL_FIELD


def seq(*values):
    return tuple(QQ.element(v) for v in values)


@pytest.fixture
def worked_system(worked_pair):
    return build_system(*worked_pair)


@pytest.fixture
def krawtchouk_system():
    A = ExactMatrix.from_rows(QQ, [[0, 2, 0], [1, 0, 1], [0, 2, 0]])
    return build_system(A, ExactMatrix.diagonal(QQ, [2, 0, -2]))


def test_monic_shift_product():
    p = MonicShiftProduct(QQ, seq(1, 2))
    assert p.coefficients() == [1, -3, 2]
    assert p.is_monic()
    assert p(QQ.element(3)) == 2
    assert MonicShiftProduct(QQ).coefficients() == [1]
    M = ExactMatrix.diagonal(QQ, [1, 2])
    assert p.evaluate_matrix(M).is_zero()


def test_tau_and_eta_roots():
    theta = seq(0, 1, 4, 9)
    assert tau(theta, 2).roots == seq(0, 1)
    assert eta(theta, 2).roots == seq(9, 4)
    assert tau(theta, 0).degree == 0
    assert tau_eta_build(theta, "eta_star", 3).roots == seq(9, 4, 1)
    with pytest.raises(IndexOutOfRange):
        tau(theta, 4)
    with pytest.raises(ValueError):
        tau_eta_build(theta, "sigma", 1)


def test_dual_gap_product():
    assert dual_gap_product(seq(0, 1, 3), 0) == 1
    assert dual_gap_product(seq(0, 1, 3), 2) == 3


def test_worked_pair_split_sequence(worked_system):
    matrices, scalars = split_matrices(worked_system)
    assert matrices[0] == worked_system.E_star[0]
    assert worked_system.E_star[0].to_strings() == [["1", "-1"], ["0", "0"]]
    assert scalars == [1, -1]
    assert split_sequence(worked_system) == [1, 1]


def test_worked_pair_parameter_array(worked_system):
    P = extract_parameter_array(worked_system)
    assert P.zeta == seq(1, 1)
    assert eq_ineq_sum(P) == 2
    report = check_conjecture_conditions(P)
    assert report.passed
    assert report.ineq_sum == 2
    assert report.common_ratio is None


def test_krawtchouk_parameter_array(krawtchouk_system):
    P = extract_parameter_array(krawtchouk_system)
    assert P.d == 2
    assert P.zeta[0] == 1
    assert not P.zeta[-1].is_zero()
    assert not eq_ineq_sum(P).is_zero()


def test_parameter_array_is_basis_independent(krawtchouk_system):
    P = extract_parameter_array(krawtchouk_system)
    rng = random.Random(11)
    for _ in range(5):
        Q = ExactMatrix.random_invertible(QQ, 3, rng)
        assert extract_parameter_array(krawtchouk_system.conjugate(Q)) == P


def test_parameter_array_survives_lift(krawtchouk_system):
    K = quadratic_extension(QQ, 3)
    P = extract_parameter_array(krawtchouk_system)
    assert extract_parameter_array(krawtchouk_system.lift(K)) == P.embed(K)


def test_non_sharp_system_rejected(worked_system):
    with pytest.raises(NotSharp):
        split_sequence(replace(worked_system, rho=(2, 2)))


def test_ratios():
    assert ratio_values(seq(0, 1, 2, 3, 4)) == [3, 3]
    assert ratios_agree(seq(0, 1, 2, 3, 4), seq(0, 1, 4, 9, 16))
    assert not ratios_agree(seq(0, 1, 2, 3, 4), seq(0, 1, 3, 7, 8))
    assert ratios_agree(seq(0, 1, 2))
    assert ratio_values(seq(0, 1, 1, 3)) == [None]
    assert not ratios_agree(seq(0, 1, 1, 3))


def test_condition_failures():
    repeated = ParameterArray(seq(0, 0), seq(0, 1), seq(1, 1))
    report = check_conjecture_conditions(repeated)
    assert report.condition_i is Verdict.FAIL
    assert report.reasons["i"] == {"repeated": {"theta": [0, 1]}}

    bent = ParameterArray(seq(0, 1, 2, 3, 4), seq(0, 1, 3, 7, 8), seq(1, 0, 0, 0, 1))
    assert check_conjecture_conditions(bent).failed_conditions() == ["ii"]

    unnormalized = ParameterArray(seq(0, 1), seq(0, 1), seq(2, 0))
    report = check_conjecture_conditions(unnormalized)
    assert report.condition_iii is Verdict.FAIL
    assert report.reasons["iii"] == ["zeta_0 != 1", "zeta_d = 0"]

    # eta_1(0) eta*_1(0) zeta_0 + zeta_1 = 1 - 1
    vanishing = ParameterArray(seq(0, 1), seq(0, 1), seq(1, -1))
    assert check_conjecture_conditions(vanishing).reasons["iii"] == ["sum vanishes"]


def test_length_mismatch():
    with pytest.raises(DimensionMismatch):
        ParameterArray(seq(0, 1), seq(0, 1, 2), seq(1, 1))
    with pytest.raises(DimensionMismatch):
        ParameterArray((), (), ())


def test_json_round_trip(worked_system):
    P = extract_parameter_array(worked_system)
    payload = P.to_json()
    assert payload == {"d": 1, "theta": ["0", "1"], "theta_star": ["0", "1"], "zeta": ["1", "1"]}
    assert ParameterArray.from_json(payload, QQ) == P
    assert ParameterArray.from_json({**payload, "field": QQ.to_json()}) == P
    with pytest.raises(DimensionMismatch):
        ParameterArray.from_json({**payload, "d": 2}, QQ)
