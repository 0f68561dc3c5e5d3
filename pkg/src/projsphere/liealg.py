"""sl(n+1), the deck matrix, its commutator operator and centralizer.

The ordered basis of sl(n+1) used throughout is: the off-diagonal unit
matrices ``E_ij`` (i != j) in row-major order, followed by the ``n``
diagonal matrices ``E_ii - E_{i+1,i+1}``.  In this basis the commutator
operator ``X -> BX - XB`` has integer entries.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BlockFormError, InvalidInputError, RankDisagreementError
from .numkernel import (
    DEFAULT_RANK_TOL,
    as_matrix,
    determinant,
    elimination_rank,
    null_space,
    orthonormalize,
    svd_rank,
)

ROTATION_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])
BLOCK_FORM_TOL = 1e-9


def _check_n(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidInputError(f"n must be an integer >= 2, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class DeckMatrix:
    n: int
    matrix: np.ndarray = field(repr=False)

    @property
    def size(self):
        return self.n + 1

    def power(self, k):
        return np.linalg.matrix_power(self.matrix, k)

    def order(self, max_order=16):
        """Smallest k >= 1 with B^k = I (exact comparison; entries are integers)."""
        P = np.eye(self.size)
        for k in range(1, max_order + 1):
            P = P @ self.matrix
            if np.array_equal(P, np.eye(self.size)):
                return k
        raise RuntimeError(f"deck matrix order exceeds {max_order}")

    def is_involution(self):
        return bool(np.array_equal(self.matrix @ self.matrix, np.eye(self.size)))


def build_deck_matrix(n):
    """The block matrix diag([[0, 1], [-1, 0]], -I_{n-1}) of size n+1.

    Note that its square is diag(-1, -1, 1, ..., 1): the map it induces on
    the sphere has no fixed points but has order 4.
    """
    n = _check_n(n)
    B = np.zeros((n + 1, n + 1))
    B[:2, :2] = ROTATION_BLOCK
    B[2:, 2:] = -np.eye(n - 1)
    B.setflags(write=False)
    return DeckMatrix(n=n, matrix=B)


def sl_basis(size):
    """Ordered basis of trace-free ``size x size`` matrices (see module doc)."""
    basis = []
    for i in range(size):
        for j in range(size):
            if i != j:
                E = np.zeros((size, size))
                E[i, j] = 1.0
                basis.append(E)
    for i in range(size - 1):
        E = np.zeros((size, size))
        E[i, i] = 1.0
        E[i + 1, i + 1] = -1.0
        basis.append(E)
    return basis


def sl_coordinates(X):
    """Coordinates of a trace-free matrix in the :func:`sl_basis` ordering."""
    X = as_matrix(X, square=True)
    size = X.shape[0]
    off = [X[i, j] for i in range(size) for j in range(size) if i != j]
    # X = sum_k c_k (E_kk - E_{k+1,k+1})  gives  c_k = X_11 + ... + X_kk
    diag = np.cumsum(np.diag(X))[:-1]
    return np.concatenate([np.asarray(off, dtype=float), diag])


def sl_matrix(coords, size):
    """Inverse of :func:`sl_coordinates`."""
    c = np.asarray(coords, dtype=float)
    if c.shape != (size * size - 1,):
        raise InvalidInputError(f"expected {size * size - 1} coordinates, got {c.shape}")
    X = np.zeros((size, size))
    k = 0
    for i in range(size):
        for j in range(size):
            if i != j:
                X[i, j] = c[k]
                k += 1
    d = c[k:]
    X[np.arange(size - 1), np.arange(size - 1)] += d
    X[np.arange(1, size), np.arange(1, size)] -= d
    return X


def trace_free_part(X):
    X = as_matrix(X, square=True)
    return X - np.trace(X) / X.shape[0] * np.eye(X.shape[0])


def sylvester_operator(deck):
    """Matrix of ``X -> BX - XB`` on sl(n+1) in the :func:`sl_basis` ordering."""
    B = deck.matrix
    size = deck.size
    columns = [sl_coordinates(B @ E - E @ B) for E in sl_basis(size)]
    return np.column_stack(columns)


@dataclass(frozen=True)
class CentralizerBasis:
    n: int
    basis: tuple = field(repr=False)
    dim: int
    svd_dim: int
    elimination_dim: int

    def __len__(self):
        return len(self.basis)


def centralizer(n, rel_tol=DEFAULT_RANK_TOL):
    """Frobenius-orthonormal basis of the trace-free matrices commuting with B.

    The kernel dimension is computed twice, from the SVD and by Gaussian
    elimination with partial pivoting.  A singular value near the rank
    threshold raises :class:`RankAmbiguityError`; disagreement between the
    two routes raises :class:`RankDisagreementError`.
    """
    deck = build_deck_matrix(n)
    size = deck.size
    op = sylvester_operator(deck)
    dim_domain = op.shape[1]
    svd_dim = dim_domain - svd_rank(op, rel_tol, strict=True)
    elim_dim = dim_domain - elimination_rank(op, rel_tol)
    if svd_dim != elim_dim:
        raise RankDisagreementError(
            f"centralizer dimension for n={n}: svd gives {svd_dim}, elimination gives {elim_dim}"
        )
    kernel = null_space(op, rel_tol, strict=True)
    mats = [sl_matrix(c, size) for c in kernel]
    # the sl basis is not Frobenius-orthonormal; re-orthonormalize
    frob = orthonormalize(np.array([M.ravel() for M in mats]), rel_tol)
    basis = tuple(row.reshape(size, size) for row in frob)
    if len(basis) != svd_dim:
        raise RankDisagreementError(
            f"orthonormalized kernel has {len(basis)} elements, expected {svd_dim}"
        )
    return CentralizerBasis(n=n, basis=basis, dim=svd_dim, svd_dim=svd_dim, elimination_dim=elim_dim)


@dataclass(frozen=True)
class BlockFormMatrix:
    alpha: float
    beta: float
    tilde_a: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.tilde_a.shape[0] + 1

    def matrix(self):
        return embed_block_form(self.alpha, self.beta, self.tilde_a)

    def det_defect(self):
        """``det(tilde_a) * (alpha^2 + beta^2) - 1``; zero exactly for group elements."""
        return determinant(self.tilde_a) * (self.alpha**2 + self.beta**2) - 1.0

    def in_group(self, det_tol=1e-8):
        return self.alpha**2 + self.beta**2 > 0.0 and abs(self.det_defect()) < det_tol


def embed_block_form(alpha, beta, tilde_a):
    Ta = as_matrix(tilde_a, square=True, name="tilde_a")
    size = Ta.shape[0] + 2
    A = np.zeros((size, size))
    A[:2, :2] = [[alpha, beta], [-beta, alpha]]
    A[2:, 2:] = Ta
    return A


def classify_block_form(X, n, tol=BLOCK_FORM_TOL, *, require_group=False, det_tol=1e-8):
    """Extract ``(alpha, beta, tilde_a)`` if ``X`` has the commuting block shape.

    The shape is: zero off-diagonal blocks and a leading 2x2 block
    ``[[alpha, beta], [-beta, alpha]]``.  With ``require_group=True`` the
    group conditions ``alpha^2 + beta^2 > 0`` and
    ``det(tilde_a) * (alpha^2 + beta^2) = 1`` are also enforced.
    Raises :class:`BlockFormError` naming the offending block.
    """
    n = _check_n(n)
    X = as_matrix(X, square=True)
    if X.shape[0] != n + 1:
        raise InvalidInputError(f"expected a {n + 1}x{n + 1} matrix, got {X.shape}")
    for name, blk in (("upper-right", X[:2, 2:]), ("lower-left", X[2:, :2])):
        norm = float(np.linalg.norm(blk))
        if norm > tol:
            raise BlockFormError(f"{name} block is not zero (norm {norm:.3e})", block=name, norm=norm)
    R = X[:2, :2]
    defect = float(np.hypot(R[0, 0] - R[1, 1], R[0, 1] + R[1, 0]))
    if defect > tol:
        raise BlockFormError(
            f"leading 2x2 block is not of the form [[a, b], [-b, a]] (defect {defect:.3e})",
            block="rotation",
            norm=defect,
        )
    alpha = 0.5 * (R[0, 0] + R[1, 1])
    beta = 0.5 * (R[0, 1] - R[1, 0])
    result = BlockFormMatrix(alpha=float(alpha), beta=float(beta), tilde_a=X[2:, 2:].copy())
    if require_group:
        r2 = alpha**2 + beta**2
        if r2 <= 0.0:
            raise BlockFormError("alpha^2 + beta^2 vanishes", block="rotation", norm=float(r2))
        dd = result.det_defect()
        if abs(dd) >= det_tol:
            raise BlockFormError(
                f"det(tilde_a) * (alpha^2 + beta^2) differs from 1 by {dd:.3e}",
                block="tilde_a",
                norm=abs(dd),
            )
    return result


def random_block_form(rng, n, *, min_det=0.1):
    """Seeded random group element of block form, as a :class:`BlockFormMatrix`.

    ``tilde_a`` is Gaussian, re-drawn until ``|det| >= min_det`` and with
    positive determinant, then rescaled so ``det(tilde_a) = 1/(alpha^2+beta^2)``.
    """
    n = _check_n(n)
    alpha, beta = rng.normal(size=2)
    while alpha**2 + beta**2 < 0.1:
        alpha, beta = rng.normal(size=2)
    m = n - 1
    while True:
        Ta = rng.normal(size=(m, m))
        d = np.linalg.det(Ta)
        if abs(d) >= min_det:
            break
    if d < 0:
        Ta[0] = -Ta[0]
        d = -d
    target = 1.0 / (alpha**2 + beta**2)
    Ta = Ta * (target / d) ** (1.0 / m)
    return BlockFormMatrix(alpha=float(alpha), beta=float(beta), tilde_a=Ta)


def dimension_formulas(n):
    """Closed-form dimensions: sl(n+1), isometry bound, and n^2 - 2n + 2."""
    n = _check_n(n)
    dim_sl = n * (n + 2)
    dim_isom_bound = n * (n + 1) // 2
    dim_proj_prime = n * n - 2 * n + 2
    return dim_sl, dim_isom_bound, dim_proj_prime


@dataclass(frozen=True)
class DimensionReport:
    n: int
    dim_sl: int
    dim_isom_bound: int
    dim_proj_prime: int
    chain_holds: bool

    def as_tuple(self):
        return (self.dim_sl, self.dim_isom_bound, self.dim_proj_prime, self.chain_holds)


def chain_holds(dim_isom_bound, dim_proj_prime, dim_sl):
    return dim_isom_bound < dim_proj_prime < dim_sl


def dimension_report(n, rel_tol=DEFAULT_RANK_TOL, *, computed=True):
    """Dimension record; ``dim_proj_prime`` is the computed centralizer dimension.

    With ``computed=False`` the closed form n^2 - 2n + 2 is used instead.
    """
    dim_sl, dim_isom, formula = dimension_formulas(n)
    dim_pp = centralizer(n, rel_tol).dim if computed else formula
    return DimensionReport(
        n=int(n),
        dim_sl=dim_sl,
        dim_isom_bound=dim_isom,
        dim_proj_prime=dim_pp,
        chain_holds=chain_holds(dim_isom, dim_pp, dim_sl),
    )
