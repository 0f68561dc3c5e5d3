"""Dense real linear algebra used by every other module.

Matrices and vectors are plain ``numpy.ndarray`` of float64.  Functions here
validate their input (shape, finiteness) and never mutate it.
"""

import math

import numpy as np

from ._kernels import kernels
from .errors import DegenerateInputError, InvalidInputError, RankAmbiguityError

DEFAULT_RANK_TOL = 1e-9
# singular values within [0.1, 10] x threshold are treated as undecidable
AMBIGUITY_BAND = 10.0


def as_matrix(M, *, square=False, name="matrix"):
    """Validate and return ``M`` as a 2-d float64 array."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 2-d array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    if square and A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {A.shape}")
    return A


def as_vector(v, *, name="vector"):
    x = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return x


def singular_values(M):
    return np.linalg.svd(as_matrix(M), compute_uv=False)


def check_rank_gap(s, rel_tol, band=AMBIGUITY_BAND):
    """Raise :class:`RankAmbiguityError` if any singular value sits near the cut.

    ``s`` are singular values in decreasing order.  The cut is
    ``rel_tol * s[0]``; values in ``[cut / band, cut * band]`` cannot be
    classified with confidence.
    """
    if len(s) == 0 or s[0] == 0.0:
        return
    cut = rel_tol * s[0]
    for sv in s:
        if cut / band <= sv <= cut * band:
            raise RankAmbiguityError(
                f"singular value {sv:.3e} is within a factor {band:g} of the "
                f"rank threshold {cut:.3e}",
                singular_value=float(sv),
                threshold=float(cut),
            )


def null_space(M, rel_tol=DEFAULT_RANK_TOL, *, strict=False):
    """Orthonormal basis of the numerical kernel of ``M``.

    Right singular vectors whose singular value is below ``rel_tol`` times
    the largest singular value are returned, as a list of 1-d arrays.  The
    zero matrix yields the full standard basis.  With ``strict=True`` a
    singular value close to the threshold raises :class:`RankAmbiguityError`.
    """
    A = as_matrix(M)
    if not 0.0 < rel_tol < 1.0:
        raise InvalidInputError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    cols = A.shape[1]
    if not np.any(A):
        return [row for row in np.eye(cols)]
    _, s, vt = np.linalg.svd(A)
    if strict:
        check_rank_gap(s, rel_tol)
    rank = int(np.sum(s >= rel_tol * s[0]))
    return [row.copy() for row in vt[rank:]]


def svd_rank(M, rel_tol=DEFAULT_RANK_TOL, *, strict=False):
    A = as_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    if strict:
        check_rank_gap(s, rel_tol)
    return int(np.sum(s >= rel_tol * s[0]))


def elimination_rank(M, rel_tol=DEFAULT_RANK_TOL):
    """Rank by Gaussian elimination with partial pivoting.

    Independent of the SVD route; used to cross-check dimension claims.
    """
    return int(kernels.elimination_rank(np.ascontiguousarray(as_matrix(M)), rel_tol))


def matrix_exp(A, tau=1.0):
    """``exp(tau * A)`` by scaling and squaring with a degree-18 Taylor kernel."""
    X = as_matrix(A, square=True) * float(tau)
    n = X.shape[0]
    norm = np.linalg.norm(X, 1)
    squarings = 0
    if norm > 0.5:
        squarings = int(math.ceil(math.log2(norm / 0.5)))
        X = X / 2.0**squarings
    # Horner evaluation of sum_{k<=18} X^k / k!
    E = np.eye(n)
    for k in range(18, 0, -1):
        E = np.eye(n) + (X @ E) / k
    for _ in range(squarings):
        E = E @ E
    return E


def determinant(M):
    """Determinant via LU with partial pivoting."""
    A = as_matrix(M, square=True)
    return float(kernels.lu_det(np.ascontiguousarray(A)))


def plane_fit(points):
    """Best-fit 2-plane through the origin for points on the unit sphere.

    Returns ``((u, w), residual)`` where ``u, w`` are the top two right
    singular vectors of the stacked points and ``residual`` is the third
    singular value over the first.  Points on one great circle give a
    residual at rounding level.
    """
    P = as_matrix(points, name="points")
    if P.shape[0] < 3:
        raise InvalidInputError(f"plane_fit needs at least 3 points, got {P.shape[0]}")
    norms = np.linalg.norm(P, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-9:
        raise InvalidInputError("plane_fit points must lie on the unit sphere")
    _, s, vt = np.linalg.svd(P, full_matrices=False)
    if len(s) < 2 or s[1] <= 1e-12 * s[0]:
        raise DegenerateInputError("points span less than two dimensions")
    residual = float(s[2] / s[0]) if len(s) > 2 else 0.0
    return (vt[0].copy(), vt[1].copy()), residual


def orthonormalize(vectors, rel_tol=DEFAULT_RANK_TOL):
    """Orthonormal basis (rows) for the span of the given row vectors."""
    V = as_matrix(vectors)
    _, s, vt = np.linalg.svd(V, full_matrices=False)
    rank = int(np.sum(s >= rel_tol * s[0])) if s[0] > 0 else 0
    return vt[:rank]
