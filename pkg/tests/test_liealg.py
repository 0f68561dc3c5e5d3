import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projsphere.errors import BlockFormError, InvalidInputError
from projsphere.liealg import (
    build_deck_matrix,
    centralizer,
    classify_block_form,
    dimension_formulas,
    dimension_report,
    embed_block_form,
    random_block_form,
    sl_basis,
    sl_coordinates,
    sl_matrix,
    sylvester_operator,
    trace_free_part,
)
from projsphere.numkernel import matrix_exp

from .oracles import commutant_rows_trace_free, commutator, exact_rank, reference_deck_matrix

# n^2 - 2n + 2 evaluated by hand
FORMULA = {2: 2, 3: 5, 4: 10, 5: 17, 6: 26, 7: 37, 8: 50}


# ------------------------------------------------------------------ deck matrix

def test_deck_matrix_n2_is_the_displayed_matrix():
    B = build_deck_matrix(2).matrix
    np.testing.assert_array_equal(B, [[0, 1, 0], [-1, 0, 0], [0, 0, -1]])


@pytest.mark.parametrize("n", range(2, 9))
def test_deck_matrix_matches_entrywise_construction(n):
    B = build_deck_matrix(n).matrix
    np.testing.assert_array_equal(B, np.array(reference_deck_matrix(n), dtype=float))
    assert set(np.unique(B)) <= {-1.0, 0.0, 1.0}


def test_deck_matrix_is_orthogonal():
    B = build_deck_matrix(5).matrix
    np.testing.assert_array_equal(B.T @ B, np.eye(6))


@pytest.mark.parametrize("n", range(2, 9))
def test_deck_matrix_square_and_order(n):
    # B^2 = diag(-1, -1, 1, ..., 1): B is not an involution, it has order 4
    deck = build_deck_matrix(n)
    expected = np.diag([-1.0, -1.0] + [1.0] * (n - 1))
    np.testing.assert_array_equal(deck.matrix @ deck.matrix, expected)
    assert not deck.is_involution()
    assert deck.order() == 4


@pytest.mark.parametrize("n", [1, 0, -3, 2.5, True])
def test_deck_matrix_rejects_small_n(n):
    with pytest.raises(InvalidInputError):
        build_deck_matrix(n)


# ------------------------------------------------------------------ sl basis and operator

@pytest.mark.parametrize("size", [3, 4, 6])
def test_sl_basis_ordering(size):
    basis = sl_basis(size)
    assert len(basis) == size * size - 1
    assert basis[0][0, 1] == 1.0
    assert basis[size - 1][1, 0] == 1.0
    last = basis[-1]
    assert last[size - 2, size - 2] == 1.0 and last[size - 1, size - 1] == -1.0
    for k, E in enumerate(basis):
        coords = sl_coordinates(E)
        expected = np.zeros(size * size - 1)
        expected[k] = 1.0
        np.testing.assert_array_equal(coords, expected)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 7))
def test_sl_coordinates_round_trip(seed, size):
    X = trace_free_part(np.random.default_rng(seed).normal(size=(size, size)))
    np.testing.assert_allclose(sl_matrix(sl_coordinates(X), size), X, atol=1e-12)


def test_sylvester_kernel_dimension_n2():
    op = sylvester_operator(build_deck_matrix(2))
    assert op.shape == (8, 8)
    assert op.shape[1] - exact_rank(op.astype(int).tolist()) == 2


def test_sylvester_operator_kills_b_itself():
    deck = build_deck_matrix(4)
    op = sylvester_operator(deck)
    coords = sl_coordinates(trace_free_part(deck.matrix))
    np.testing.assert_allclose(op @ coords, 0.0, atol=1e-14)


def test_sylvester_operator_on_off_block_unit_matrix_n3():
    deck = build_deck_matrix(3)
    op = sylvester_operator(deck)
    # E_13 is already trace free; index in the basis: row 0, column 2
    X = [[0, 0, 1, 0], [0] * 4, [0] * 4, [0] * 4]
    expected = commutator(reference_deck_matrix(3), X)
    coords = np.zeros(15)
    coords[1] = 1.0  # E_13 is the second off-diagonal element of row 0
    image = sl_matrix(op @ coords, 4)
    np.testing.assert_array_equal(image, np.array(expected, dtype=float))
    assert np.any(image)


# ------------------------------------------------------------------ centralizer

@pytest.mark.parametrize("n", range(2, 9))
def test_centralizer_dimension(n):
    basis = centralizer(n)
    assert basis.dim == FORMULA[n] == n * n - 2 * n + 2
    assert basis.svd_dim == basis.elimination_dim == basis.dim
    assert len(basis) == basis.dim


@pytest.mark.parametrize("n", [2, 3, 4])
def test_centralizer_dimension_exact_rational(n):
    rows = commutant_rows_trace_free(reference_deck_matrix(n))
    unknowns = (n + 1) ** 2
    assert unknowns - exact_rank(rows) == FORMULA[n]


def test_centralizer_n4_exact_sylvester_system():
    op = sylvester_operator(build_deck_matrix(4))
    assert op.shape == (24, 24)
    assert 24 - exact_rank(op.astype(int).tolist()) == 10
    assert centralizer(4).dim == 10


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_centralizer_basis_properties(n):
    B = build_deck_matrix(n).matrix
    basis = centralizer(n).basis
    G = np.array([[np.sum(X * Y) for Y in basis] for X in basis])
    np.testing.assert_allclose(G, np.eye(len(basis)), atol=1e-12)
    for X in basis:
        assert np.linalg.norm(B @ X - X @ B) <= 1e-9
        assert abs(np.trace(X)) <= 1e-10


# ------------------------------------------------------------------ block form

def test_classify_identity():
    bf = classify_block_form(np.eye(4), 3)
    assert (bf.alpha, bf.beta) == (1.0, 0.0)
    np.testing.assert_array_equal(bf.tilde_a, np.eye(2))
    assert bf.in_group()


def test_classify_deck_matrix():
    bf = classify_block_form(build_deck_matrix(3).matrix, 3)
    assert (bf.alpha, bf.beta) == (0.0, 1.0)
    np.testing.assert_array_equal(bf.tilde_a, -np.eye(2))
    assert bf.in_group()


def test_classify_rejects_off_block_entry():
    X = np.zeros((4, 4))
    X[0, 2] = 1.0
    with pytest.raises(BlockFormError) as info:
        classify_block_form(X, 3)
    assert info.value.block == "upper-right"
    assert info.value.norm == pytest.approx(1.0)


def test_classify_rejects_wrong_rotation_block():
    X = np.eye(4)
    X[0, 0] = 2.0
    with pytest.raises(BlockFormError) as info:
        classify_block_form(X, 3)
    assert info.value.block == "rotation"


def test_classify_group_condition():
    X = embed_block_form(1.0, 1.0, np.eye(2))  # det(tilde_a) * 2 = 2
    classify_block_form(X, 3)
    with pytest.raises(BlockFormError) as info:
        classify_block_form(X, 3, require_group=True)
    assert info.value.block == "tilde_a"


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("t", [0.1, 1.0])
def test_exponentiated_centralizer_is_block_form_group(n, t):
    for X in centralizer(n).basis:
        bf = classify_block_form(matrix_exp(X, t), n, require_group=True)
        assert abs(bf.det_defect()) < 1e-8


@pytest.mark.parametrize("n", range(2, 9))
def test_random_block_form_commutes_with_deck(n):
    B = build_deck_matrix(n).matrix
    rng = np.random.default_rng(n)
    for _ in range(20):
        bf = random_block_form(rng, n)
        assert bf.in_group(1e-9)
        A = bf.matrix()
        assert np.max(np.abs(A @ B - B @ A)) <= 1e-12


# ------------------------------------------------------------------ dimensions

def test_dimension_report_examples():
    assert dimension_report(5).as_tuple() == (35, 15, 17, True)
    assert dimension_report(4).as_tuple() == (24, 10, 10, False)
    assert dimension_report(2).as_tuple() == (8, 3, 2, False)


@pytest.mark.parametrize("n", range(2, 9))
def test_chain_holds_exactly_above_four(n):
    rep = dimension_report(n)
    assert rep.chain_holds == (n > 4)
    assert rep.dim_proj_prime < rep.dim_sl
    assert rep == dimension_report(n, computed=False)


def test_dimension_formulas_large_n():
    for n in range(5, 200):
        sl, iso, pp = dimension_formulas(n)
        assert iso < pp < sl
        assert pp == (n - 1) ** 2 + 1 and sl == (n + 1) ** 2 - 1
