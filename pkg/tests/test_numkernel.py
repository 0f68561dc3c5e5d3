import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from projsphere.errors import DegenerateInputError, InvalidInputError, RankAmbiguityError
from projsphere.liealg import build_deck_matrix, sylvester_operator
from projsphere.numkernel import (
    check_rank_gap,
    determinant,
    elimination_rank,
    matrix_exp,
    null_space,
    plane_fit,
    svd_rank,
)

from .oracles import exact_det, exact_rank


# ------------------------------------------------------------------ null_space

def test_null_space_of_zero_matrix_is_everything():
    basis = null_space(np.zeros((4, 4)))
    assert len(basis) == 4
    np.testing.assert_array_equal(np.array(basis), np.eye(4))


def test_null_space_of_identity_is_empty():
    assert null_space(np.eye(4)) == []


def test_null_space_of_sylvester_operator_n3():
    op = sylvester_operator(build_deck_matrix(3))
    assert op.shape == (15, 15)
    # frozen from the exact-rational oracle
    assert exact_rank(op.astype(int).tolist()) == 10
    assert len(null_space(op, 1e-9)) == 5


@pytest.mark.parametrize("bad", [np.zeros((0, 3)), np.array([[1.0, np.nan]]), np.array([[np.inf]])])
def test_null_space_rejects_bad_input(bad):
    with pytest.raises(InvalidInputError):
        null_space(bad)


def test_null_space_rejects_tolerance_out_of_range():
    with pytest.raises(InvalidInputError):
        null_space(np.eye(2), 1.5)


@st.composite
def low_rank_integer_matrices(draw):
    m = draw(st.integers(2, 7))
    n = draw(st.integers(2, 7))
    r = draw(st.integers(0, min(m, n)))
    U = draw(arrays(np.int64, (m, r), elements=st.integers(-1, 1)))
    V = draw(arrays(np.int64, (r, n), elements=st.integers(-1, 1)))
    return (U @ V).astype(float)


@settings(max_examples=200, deadline=None)
@given(low_rank_integer_matrices())
def test_two_rank_routes_agree_with_exact_rank(M):
    true_rank = exact_rank(M.astype(int).tolist())
    if np.any(M):
        assert svd_rank(M) == true_rank
        assert elimination_rank(M) == true_rank
        basis = null_space(M)
        assert len(basis) == M.shape[1] - true_rank
        if basis:
            V = np.array(basis)
            np.testing.assert_allclose(V @ V.T, np.eye(len(basis)), atol=1e-12)
            assert np.max(np.linalg.norm(M @ V.T, axis=0)) <= 1e-9 * np.linalg.norm(M, 2)
    else:
        assert len(null_space(M)) == M.shape[1]


def test_rank_gap_guard_band():
    check_rank_gap(np.array([1.0, 0.5, 1e-15]), 1e-9)
    with pytest.raises(RankAmbiguityError) as info:
        check_rank_gap(np.array([1.0, 3e-9]), 1e-9)
    assert info.value.threshold == pytest.approx(1e-9)
    with pytest.raises(RankAmbiguityError):
        null_space(np.diag([1.0, 2e-10]), 1e-9, strict=True)


# ------------------------------------------------------------------ matrix_exp

def test_exp_at_zero_is_identity(rng):
    A = rng.normal(size=(5, 5))
    np.testing.assert_array_equal(matrix_exp(A, 0.0), np.eye(5))


def test_exp_of_rotation_generator_quarter_turn():
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    tau = math.pi / 2
    closed_form = math.cos(tau) * np.eye(2) + math.sin(tau) * J
    np.testing.assert_allclose(matrix_exp(J, tau), closed_form, atol=1e-15)
    np.testing.assert_allclose(matrix_exp(J, tau), J, atol=1e-15)


@pytest.mark.parametrize("size", [2, 3, 6, 9])
@pytest.mark.parametrize("scale", [0.01, 1.0, 4.0, 10.0])
def test_exp_matches_scipy_reference(rng, size, scale):
    A = rng.normal(size=(size, size))
    A *= scale / np.linalg.norm(A)
    ref = scipy.linalg.expm(A)
    err = np.linalg.norm(matrix_exp(A) - ref) / np.linalg.norm(ref)
    assert err < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
def test_exp_group_law(seed, tau, sigma):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4))
    A /= np.linalg.norm(A)
    lhs = matrix_exp(A, tau + sigma)
    rhs = matrix_exp(A, tau) @ matrix_exp(A, sigma)
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(lhs)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(-2, 2))
def test_exp_of_trace_free_lands_in_sl(seed, tau):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(5, 5))
    A -= np.trace(A) / 5 * np.eye(5)
    assert abs(determinant(matrix_exp(A, tau)) - 1.0) < 1e-9


def test_exp_rejects_non_square():
    with pytest.raises(InvalidInputError):
        matrix_exp(np.ones((2, 3)))


# ------------------------------------------------------------------ determinant

def test_determinant_examples():
    assert determinant(np.eye(6)) == 1.0
    assert determinant(build_deck_matrix(3).matrix) == pytest.approx(1.0, rel=1e-10)
    assert determinant(np.diag([2.0, 0.5, 1.0, 1.0])) == pytest.approx(1.0, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 6)).map(lambda t: (t[0], t[0])),
              elements=st.integers(-3, 3)))
def test_determinant_matches_exact(M):
    exact = float(exact_det(M.tolist()))
    assert determinant(M.astype(float)) == pytest.approx(exact, rel=1e-10, abs=1e-9)


def test_determinant_rejects_non_square():
    with pytest.raises(InvalidInputError):
        determinant(np.ones((3, 2)))


# ------------------------------------------------------------------ plane_fit

def test_plane_fit_exact_great_circle():
    t = np.linspace(0, 2 * np.pi, 50)
    pts = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
    (u, w), residual = plane_fit(pts)
    assert residual < 1e-12
    assert abs(u @ w) < 1e-12


def test_plane_fit_small_circle_is_far_from_a_plane():
    t = np.arange(50) * (2 * np.pi / 50)
    r = 1 / math.sqrt(2)
    pts = np.stack([r * np.cos(t), r * np.sin(t), np.full_like(t, r)], axis=1)
    _, residual = plane_fit(pts)
    # oracle: third/first singular value of the sample matrix computed directly
    s = np.sqrt(np.sort(np.linalg.eigvalsh(pts.T @ pts))[::-1])
    assert residual == pytest.approx(s[2] / s[0], rel=1e-12)
    assert residual > 0.1


def test_plane_fit_three_coplanar_points():
    e1, e2 = np.eye(3)[:2]
    _, residual = plane_fit([e1, e2, (e1 + e2) / math.sqrt(2)])
    assert residual < 1e-12


def test_plane_fit_errors():
    e = np.eye(3)
    with pytest.raises(InvalidInputError):
        plane_fit([e[0], e[1]])
    with pytest.raises(DegenerateInputError):
        plane_fit([e[0], e[0], -e[0]])
    with pytest.raises(InvalidInputError):
        plane_fit([e[0], e[1], 2 * e[2]])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_plane_fit_residual_is_orthogonally_invariant(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(20, 4))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    _, r1 = plane_fit(pts)
    _, r2 = plane_fit(pts @ Q.T)
    assert abs(r1 - r2) < 1e-12
