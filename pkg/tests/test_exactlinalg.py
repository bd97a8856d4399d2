import random

import pytest
from hypothesis import assume, given, strategies as st

from engine.errors import (
    DimensionMismatch,
    DivisionByZero,
    EigenvalueSearchFailed,
    NotDiagonalizable,
    TooLarge,
    ZeroVector,
)
from engine.exactfield import RATIONAL_FIELD, prime_field, quadratic_extension
from engine.exactlinalg import (
    ExactMatrix,
    Subspace,
    all_subspaces,
    brute_force_invariant_subspaces,
    characteristic_polynomial,
    eigen_decompose,
    is_zero_vector,
    is_irreducible_pair,
    kernel,
    polynomial_roots,
    require_diagonalizable,
    spin_up,
)

QQ = RATIONAL_FIELD
GF2 = prime_field(2)
GF3 = prime_field(3)
GF13 = prime_field(13)


def m(field, rows):
    return ExactMatrix.from_rows(field, rows)


def test_matrix_arithmetic():
    A = m(QQ, [[1, 2], [3, 4]])
    B = m(QQ, [[0, 1], [1, 0]])
    assert (A @ B).to_strings() == [["2", "1"], ["4", "3"]]
    assert (A + B - B) == A
    assert (A * 2)[1, 1] == 8
    assert A.trace() == 5
    assert A.T[0, 1] == 3
    assert A.power(0).is_identity()
    assert A.power(2) == A @ A


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        m(QQ, [[1, 2], [3]])
    with pytest.raises(DimensionMismatch):
        m(QQ, [[1, 2]]) @ m(QQ, [[1, 2]])


def test_inverse_and_singular():
    A = m(QQ, [[2, 1], [1, 1]])
    assert (A @ A.inverse()).is_identity()
    with pytest.raises(DivisionByZero):
        m(QQ, [[1, 2], [2, 4]]).inverse()


@given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=4))
def test_random_invertible_has_inverse(seed, n):
    P = ExactMatrix.random_invertible(GF13, n, random.Random(seed))
    assert (P.inverse() @ P).is_identity()
    assert P.rank() == n


def test_rank_and_rref():
    A = m(QQ, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    R, pivots = A.rref()
    assert A.rank() == 2
    assert pivots == [0, 1]
    assert R.row(2) == (QQ.zero(),) * 3


def test_solve():
    A = m(QQ, [[1, 1], [1, -1]])
    x = A.solve([QQ.element(3), QQ.element(1)])
    assert x == (QQ.element(2), QQ.element(1))
    assert m(QQ, [[1, 1], [1, 1]]).solve([QQ.one(), QQ.zero()]) is None


def test_scalar_multiple_of():
    E = m(QQ, [[1, -1], [0, 0]])
    assert (E * -3).scalar_multiple_of(E) == -3
    assert m(QQ, [[1, 0], [0, 0]]).scalar_multiple_of(E) is None


def test_kernel_and_subspaces():
    K = kernel(m(QQ, [[1, 1], [1, 1]]))
    assert K.dim == 1
    assert K.contains([QQ.element(1), QQ.element(-1)])
    assert K.annihilator().contains([QQ.one(), QQ.one()])
    full = Subspace.full(QQ, 2)
    assert full.contains_subspace(K)
    assert K.join(Subspace.from_vectors(QQ, 2, [[QQ.one(), QQ.zero()]])).is_full()


def test_spin_up():
    shift = m(QQ, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    e1 = [QQ.one(), QQ.zero(), QQ.zero()]
    assert spin_up(e1, [shift]).is_full()
    diagonal = ExactMatrix.diagonal(QQ, [1, 2, 3])
    assert spin_up(e1, [diagonal]).dim == 1
    with pytest.raises(ZeroVector):
        spin_up([QQ.zero()] * 3, [shift])


@given(st.integers(min_value=0, max_value=10 ** 6), st.sampled_from([GF2, GF3]), st.integers(min_value=2, max_value=3))
def test_spin_up_is_the_smallest_invariant_subspace(seed, field, n):
    rng = random.Random(seed)
    generators = [ExactMatrix.random(field, n, n, rng) for _ in range(2)]
    v = [field.random_element(rng) for _ in range(n)]
    assume(not is_zero_vector(v))
    S = spin_up(v, generators)
    assert S.contains(v)
    assert all(S.is_invariant_under(G) for G in generators)
    for T in brute_force_invariant_subspaces(*generators):
        if T.contains(v):
            assert T.contains_subspace(S)


@given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4))
def test_kernel_rank_nullity(seed, rows, cols):
    rng = random.Random(seed)
    M = ExactMatrix.random(QQ, rows, cols, rng)
    # low-rank half the time so kernels are not always trivial
    if rows > 1 and rng.random() < 0.5:
        M = ExactMatrix.from_rows(QQ, [list(M.row(0))] * rows)
    K = kernel(M)
    assert K.dim + M.rank() == cols
    assert all(is_zero_vector(M.apply(b)) for b in K.basis)


def test_characteristic_polynomial():
    A = m(QQ, [[2, 1], [1, 2]])
    assert characteristic_polynomial(A) == [1, -4, 3]
    triangular = m(GF13, [[1, 5, 7], [0, 2, 3], [0, 0, 3]])
    assert characteristic_polynomial(triangular) == [1, -6, 11, -6]


def test_eigen_decompose_rational():
    decomposition = eigen_decompose(m(QQ, [[2, 1], [1, 2]]))
    assert decomposition.eigenvalues == (QQ.element(1), QQ.element(3))
    assert decomposition.diagonalizable
    assert [W.dim for W in decomposition.eigenspaces] == [1, 1]


def test_eigen_decompose_needs_split_polynomial():
    with pytest.raises(EigenvalueSearchFailed):
        eigen_decompose(m(QQ, [[0, 2], [1, 0]]))


def test_eigenvalues_in_quadratic_extension():
    K = quadratic_extension(QQ, 2)
    A = ExactMatrix.from_rows(K, [[0, 2], [1, 0]])
    decomposition = eigen_decompose(A)
    r = K.sqrt_delta()
    assert set(decomposition.eigenvalues) == {r, -r}


def test_height_two_needs_candidates():
    K = quadratic_extension(QQ, 2)
    L = quadratic_extension(K, 3)
    coeffs = [L.one(), L.zero(), L.element(-3)]
    with pytest.raises(EigenvalueSearchFailed):
        polynomial_roots(coeffs)
    roots = polynomial_roots(coeffs, candidates=[L.sqrt_delta(), -L.sqrt_delta()])
    assert len(roots) == 2


def test_not_diagonalizable():
    with pytest.raises(NotDiagonalizable):
        require_diagonalizable(m(QQ, [[1, 1], [0, 1]]))


def test_worked_pair_is_irreducible(worked_pair):
    verdict = is_irreducible_pair(*worked_pair)
    assert verdict.irreducible
    assert verdict.method == "norton"


def test_reducible_pair_has_invariant_witness():
    A = ExactMatrix.diagonal(QQ, [1, 2])
    Astar = ExactMatrix.diagonal(QQ, [3, 4])
    verdict = is_irreducible_pair(A, Astar)
    assert not verdict.irreducible
    assert verdict.witness.is_proper()
    assert verdict.witness.is_invariant_under(A)
    assert verdict.witness.is_invariant_under(Astar)


def test_identity_pair_is_reducible():
    I = ExactMatrix.identity(QQ, 3)
    verdict = is_irreducible_pair(I, I)
    assert not verdict
    assert verdict.witness.dim == 1


def test_all_subspaces_counts():
    # Gaussian binomials: GF(2)^3 has 1 + 7 + 7 + 1 subspaces
    assert sum(1 for _ in all_subspaces(GF2, 3)) == 16
    assert sum(1 for _ in all_subspaces(GF3, 2)) == 6


def test_brute_force_limits():
    A = ExactMatrix.identity(GF13, 2)
    with pytest.raises(TooLarge):
        brute_force_invariant_subspaces(A, A)
    I5 = ExactMatrix.identity(GF2, 5)
    with pytest.raises(TooLarge):
        brute_force_invariant_subspaces(I5, I5)


def test_brute_force_on_worked_pair_over_gf3():
    A = m(GF3, [[0, 0], [1, 1]])
    Astar = m(GF3, [[0, 1], [0, 1]])
    invariant = brute_force_invariant_subspaces(A, Astar)
    assert all(not S.is_proper() for S in invariant)
    assert is_irreducible_pair(A, Astar).irreducible
