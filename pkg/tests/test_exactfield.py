from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from engine.errors import (
    DivisionByZero,
    EvenCharacteristic,
    ExtensionHeightExceeded,
    MixedFields,
    NotAnExtension,
    NotInBaseField,
    ScalarParseError,
)
from engine.exactfield import (
    RATIONAL_FIELD,
    adjoin_square_root,
    embed,
    field_arithmetic,
    field_from_json,
    field_from_literal,
    least_non_residue,
    prime_field,
    project,
    quadratic_extension,
    solve_quadratic,
)

GF13 = prime_field(13)
QQ_SQRT2 = quadratic_extension(RATIONAL_FIELD, 2)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)
residues = st.integers(min_value=0, max_value=12)


def test_rational_parse_and_format():
    x = RATIONAL_FIELD.parse("3/4")
    assert x.value == Fraction(3, 4)
    assert str(x) == "3/4"
    assert str(RATIONAL_FIELD.element(-2)) == "-2"


def test_prime_parse_and_format():
    assert GF13.element(-1).value == 12
    assert str(GF13.element(-1)) == "12 mod 13"
    assert GF13.parse("5 mod 13") == GF13.element(5)
    assert GF13.parse("1/2") * 2 == 1


@pytest.mark.parametrize("text", ["", "x", "1/0", "abc mod 13"])
def test_bad_rational_scalars(text):
    with pytest.raises(ScalarParseError):
        RATIONAL_FIELD.parse(text)


def test_prime_modulus_mismatch():
    with pytest.raises(ScalarParseError):
        GF13.parse("5 mod 7")


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        RATIONAL_FIELD.zero().inverse()
    with pytest.raises(DivisionByZero):
        GF13.element(Fraction(1, 13))
    with pytest.raises(ZeroDivisionError):
        GF13.one() / GF13.zero()


def test_mixed_fields_rejected():
    with pytest.raises(MixedFields):
        RATIONAL_FIELD.one() + GF13.one()
    with pytest.raises(MixedFields):
        field_arithmetic(RATIONAL_FIELD.one(), GF13.one(), "mul")


def test_negative_powers():
    assert RATIONAL_FIELD.element(2) ** -2 == Fraction(1, 4)
    assert GF13.element(2) ** -1 == GF13.element(7)


@given(fractions)
def test_hash_agrees_with_numbers(x):
    for element in (RATIONAL_FIELD.element(x), QQ_SQRT2.element(x)):
        assert element == x
        assert hash(element) == hash(x)
        assert len({element, x}) == 1
        assert {x: "found"}[element] == "found"


@given(residues)
def test_hash_agrees_with_residues(r):
    assert hash(GF13.element(r)) == hash(r)
    assert len({GF13.element(r), r}) == 1
    assert GF13.element(r) in {GF13.element(r + 13)}


@given(fractions, fractions, fractions)
def test_rational_field_axioms(a, b, c):
    x, y, z = (RATIONAL_FIELD.element(v) for v in (a, b, c))
    assert (x + y) * z == x * z + y * z
    assert x - x == 0
    if not x.is_zero():
        assert x * x.inverse() == 1


@given(residues, residues, residues)
def test_prime_field_axioms(a, b, c):
    x, y, z = (GF13.element(v) for v in (a, b, c))
    assert (x + y) * z == x * z + y * z
    assert x * (y * z) == (x * y) * z
    if not x.is_zero():
        assert x / x == 1


@given(fractions, fractions, fractions, fractions)
def test_extension_field_axioms(u1, v1, u2, v2):
    x = QQ_SQRT2.element(u1) + QQ_SQRT2.sqrt_delta() * v1
    y = QQ_SQRT2.element(u2) + QQ_SQRT2.sqrt_delta() * v2
    assert x * y == y * x
    assert (x * y).norm() == x.norm() * y.norm()
    if not x.is_zero():
        assert x * x.inverse() == 1


@given(fractions, fractions)
def test_extension_scalar_strings(u, v):
    x = QQ_SQRT2.element(u) + QQ_SQRT2.sqrt_delta() * v
    assert QQ_SQRT2.parse(str(x)) == x


def test_height_two_scalar_strings():
    tower = quadratic_extension(QQ_SQRT2, 3)
    u = tower.element(QQ_SQRT2.element(1) + QQ_SQRT2.sqrt_delta() * 2)
    v = tower.element(QQ_SQRT2.sqrt_delta())
    x = u + tower.sqrt_delta() * v
    assert tower.height == 2
    assert tower.parse(str(x)) == x


def test_sqrt_delta_squares_to_delta():
    r = QQ_SQRT2.sqrt_delta()
    assert r * r == 2
    assert r.sqrt() is None


def test_prime_sqrt():
    assert GF13.element(4).sqrt() ** 2 == 4
    assert GF13.element(2).sqrt() is None
    assert least_non_residue(13) == 2
    assert least_non_residue(7) == 3


def test_adjoin_square_root_over_rationals():
    ext, root = adjoin_square_root(RATIONAL_FIELD.element(8))
    assert ext.delta == 2
    assert root * root == embed(RATIONAL_FIELD.element(8), ext)


def test_adjoin_square_root_over_prime_field():
    x = GF13.element(5)
    assert x.sqrt() is None
    ext, root = adjoin_square_root(x)
    assert ext.order == 169
    assert root * root == embed(x, ext)


def test_adjoin_square_root_of_a_square_is_rejected():
    with pytest.raises(ValueError):
        adjoin_square_root(RATIONAL_FIELD.element(9))


def test_tower_height_capped():
    tower = quadratic_extension(QQ_SQRT2, 3)
    with pytest.raises(ExtensionHeightExceeded):
        adjoin_square_root(tower.element(5))
    with pytest.raises(ExtensionHeightExceeded):
        quadratic_extension(tower, 5)


def test_characteristic_two_has_no_extensions():
    with pytest.raises(EvenCharacteristic):
        quadratic_extension(prime_field(2), 1)
    F2 = prime_field(2)
    with pytest.raises(EvenCharacteristic):
        solve_quadratic(F2.one(), F2.one(), F2.one())


def test_solve_quadratic_extends_rationals():
    one = RATIONAL_FIELD.one()
    solution = solve_quadratic(one, RATIONAL_FIELD.zero(), RATIONAL_FIELD.element(-2))
    assert solution.extended
    assert solution.field == QQ_SQRT2
    assert all(r * r == 2 for r in solution.roots)
    assert solution.roots[0] == -solution.roots[1]


def test_solve_quadratic_rational_roots():
    one = RATIONAL_FIELD.one()
    solution = solve_quadratic(one, RATIONAL_FIELD.element(-5), RATIONAL_FIELD.element(6))
    assert not solution.extended
    assert sorted(r.value for r in solution.roots) == [2, 3]


def test_solve_quadratic_prime_field():
    solution = solve_quadratic(GF13.one(), GF13.zero(), GF13.one())
    assert {r.value for r in solution.roots} == {5, 8}
    double = solve_quadratic(GF13.one(), GF13.element(-2), GF13.one())
    assert double.roots == (GF13.one(), GF13.one())
    none = solve_quadratic(GF13.one(), GF13.zero(), GF13.element(-2))
    assert none.roots == ()


def test_embed_and_project():
    x = RATIONAL_FIELD.element(Fraction(5, 3))
    lifted = embed(x, QQ_SQRT2)
    assert project(lifted, RATIONAL_FIELD) == x
    with pytest.raises(NotInBaseField):
        project(QQ_SQRT2.sqrt_delta(), RATIONAL_FIELD)
    with pytest.raises(NotAnExtension):
        embed(GF13.one(), QQ_SQRT2)


def test_finite_extension_enumeration():
    F3 = prime_field(3)
    ext = quadratic_extension(F3, least_non_residue(3))
    elements = list(ext.elements())
    assert len(elements) == 9 == ext.order
    assert len(set(elements)) == 9


def test_field_literals_and_json():
    assert field_from_literal("rational") == RATIONAL_FIELD
    assert field_from_literal("gf:13") == GF13
    with pytest.raises(ScalarParseError):
        field_from_literal("gf:12")
    with pytest.raises(ScalarParseError):
        field_from_literal("reals")
    assert field_from_json(QQ_SQRT2.to_json()) == QQ_SQRT2
    assert field_from_json(GF13.to_json()) == GF13
    assert str(QQ_SQRT2) == "QQ(sqrt(2))"
