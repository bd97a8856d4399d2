import pytest

from engine.errors import DimensionMismatch, MixedFields, PolynomialParseError
from engine.exactfield import RATIONAL_FIELD, prime_field
from engine.exactlinalg import ExactMatrix
from engine.polynomial import MPolynomial, monomials_up_to_degree, parse_polynomial

QQ = RATIONAL_FIELD
GF13 = prime_field(13)


def test_parse_and_print():
    f = parse_polynomial("3*x1^2*x2 - 1/2*x3", QQ, 3)
    assert f.terms == {(2, 1, 0): QQ.element(3), (0, 0, 1): QQ.parse("-1/2")}
    assert str(f) == "3*x1^2*x2 + -1/2*x3"
    assert f.degree() == 3


def test_parse_grouping_and_powers():
    f = parse_polynomial("(x1 + 1)^2 - x1*(x1 + 2)", QQ, 1)
    assert f == MPolynomial.constant(QQ, 1, 1)
    assert parse_polynomial("-x2 + +x1", QQ, 2) == MPolynomial.variable(QQ, 2, 1) - MPolynomial.variable(QQ, 2, 2)


def test_parse_over_prime_field():
    f = parse_polynomial("x1/2", GF13, 1)
    assert f.evaluate([GF13.element(2)]) == 1


@pytest.mark.parametrize("text", ["", "   ", "x1 +", "x3", "2*y", "x1/x1", "1/0", "(x1", "x1^x2"])
def test_parse_errors(text):
    with pytest.raises(PolynomialParseError):
        parse_polynomial(text, QQ, 2)


def test_error_positions():
    with pytest.raises(PolynomialParseError) as excinfo:
        parse_polynomial("x1 + x7", QQ, 2)
    assert excinfo.value.details["position"] == 5


def test_arithmetic():
    x1, x2 = MPolynomial.variables(QQ, 2)
    f = (x1 + x2) ** 2
    assert f == x1 * x1 + 2 * x1 * x2 + x2 * x2
    assert (f - f).is_zero()
    assert (1 - x1).evaluate([QQ.element(3), QQ.zero()]) == -2
    assert (x1 ** 0) == MPolynomial.constant(QQ, 2, 1)
    with pytest.raises(ValueError):
        x1 ** -1


def test_mixing_rejected():
    with pytest.raises(MixedFields):
        MPolynomial.variable(QQ, 1, 1) + MPolynomial.variable(GF13, 1, 1)
    with pytest.raises(DimensionMismatch):
        MPolynomial.variable(QQ, 1, 1) + MPolynomial.variable(QQ, 2, 1)
    with pytest.raises(DimensionMismatch):
        MPolynomial.variable(QQ, 2, 3)
    with pytest.raises(DimensionMismatch):
        MPolynomial.variable(QQ, 2, 1).evaluate([QQ.one()])


def test_evaluate_matrices():
    f = parse_polynomial("x1*x2 + 2", QQ, 2)
    M1 = ExactMatrix.diagonal(QQ, [1, 2])
    M2 = ExactMatrix.diagonal(QQ, [3, 4])
    unit = ExactMatrix.identity(QQ, 2)
    assert f.evaluate_matrices([M1, M2], unit) == ExactMatrix.diagonal(QQ, [5, 10])
    assert MPolynomial.zero(QQ, 2).evaluate_matrices([M1, M2], unit).is_zero()


def test_monomials_up_to_degree():
    monomials = monomials_up_to_degree(QQ, 2, 2)
    assert len(monomials) == 6
    assert str(monomials[0]) == "1"
    assert [m.degree() for m in monomials] == [0, 1, 1, 2, 2, 2]
    assert len(monomials_up_to_degree(GF13, 3, 3)) == 20
