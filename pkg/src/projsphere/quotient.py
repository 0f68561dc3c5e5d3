"""The quotient of S^n by the cyclic group generated by the deck matrix B.

The deck matrix diag([[0, 1], [-1, 0]], -I) has order 4, not 2: its square
is diag(-1, -1, 1, ..., 1).  Orbits and the descent test therefore use the
whole cyclic group {I, B, B^2, B^3}.  ``b`` itself moves every point by at
least sqrt(2), but ``b^2`` fixes the points with x_1 = x_2 = 0.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .liealg import DeckMatrix, build_deck_matrix
from .numkernel import determinant
from .sphere import ProjectiveMap, apply, as_sphere_point, projective_distance, random_sphere_points

DESCENT_TOL = 1e-9
EQUAL_TOL = 1e-9


@dataclass(frozen=True)
class QuotientSpace:
    n: int
    deck: DeckMatrix = field(repr=False)

    @classmethod
    def of_dimension(cls, n):
        return cls(n=n, deck=build_deck_matrix(n))

    @property
    def B(self):
        return self.deck.matrix

    def deck_group(self):
        """The distinct powers B^0, ..., B^(k-1), k the order of B."""
        return [self.deck.power(k) for k in range(self.deck.order())]


@dataclass(frozen=True)
class OrbitPoint:
    representative: np.ndarray

    def __eq__(self, other):
        return isinstance(other, OrbitPoint) and np.array_equal(self.representative, other.representative)

    def __hash__(self):
        return hash(self.representative.tobytes())


def _lex_key(v):
    return tuple(float(c) for c in v)


def orbit(q, v):
    return [P @ v for P in q.deck_group()]


def canonical_representative(q, v):
    """Lexicographically largest point of the deck orbit of ``v``."""
    v = as_sphere_point(v, tol=1e-10)
    if v.shape != (q.n + 1,):
        raise InvalidInputError(f"point has dimension {v.shape[0]}, expected {q.n + 1}")
    # -0.0 and 0.0 compare equal but differ bitwise; normalize them
    pts = [p + 0.0 for p in orbit(q, v)]
    best = max(pts, key=_lex_key)
    return OrbitPoint(representative=best)


class FreeActionCheck(NamedTuple):
    free: bool
    min_displacement: float
    det_b_minus_i: float
    involution: bool
    deck_order: int


def verify_free_action(q, samples=10_000, *, seed=0):
    """Check that ``b`` has no fixed points on the sphere.

    ``free`` requires the sampled minimum of ``|Bv - v|`` to be at least 1
    (the exact minimum is sqrt(2)) and ``det(B - I) != 0``.  Whether B is an
    involution and its order are reported separately.
    """
    if samples < 100:
        raise InvalidInputError(f"samples must be at least 100, got {samples}")
    rng = np.random.default_rng(seed)
    pts = random_sphere_points(rng, q.n, samples)
    disp = np.linalg.norm(pts @ q.B.T - pts, axis=1)
    min_disp = float(np.min(disp))
    det = determinant(q.B - np.eye(q.n + 1))
    return FreeActionCheck(
        free=bool(min_disp >= 1.0 and det != 0.0),
        min_displacement=min_disp,
        det_b_minus_i=det,
        involution=q.deck.is_involution(),
        deck_order=q.deck.order(),
    )


class DescentCheck(NamedTuple):
    descends: bool
    residual: float


def _matrix(m):
    return m.matrix if isinstance(m, ProjectiveMap) else np.asarray(m, dtype=float)


def descent_residual(q, pmap):
    """``min_T |A B A^-1 - T| / |B|`` over T in {+-B, +-B^-1}."""
    A = _matrix(pmap)
    B = q.B
    conj = A @ B @ np.linalg.inv(A)
    Binv = B.T  # B is orthogonal
    nb = np.linalg.norm(B)
    return float(min(np.linalg.norm(conj - T) for T in (B, -B, Binv, -Binv)) / nb)


def descends(q, pmap, tol=DESCENT_TOL, *, point_check=0, seed=0):
    """Whether the projective map induces a map of the quotient.

    The test is algebraic: A B A^-1 must be a generator of the deck group
    (up to sign).  With ``point_check > 0`` it is cross-checked on that many
    seeded points: the canonical representative of the image must not
    depend on which orbit point is mapped.
    """
    r = descent_residual(q, pmap)
    ok = r < tol
    if ok and point_check:
        if not _point_descent(q, pmap, point_check, seed):
            raise AssertionError("algebraic descent test passed but the point-level check failed")
    return DescentCheck(ok, r)


def _point_descent(q, pmap, count, seed, atol=1e-9):
    rng = np.random.default_rng(seed)
    for v in random_sphere_points(rng, q.n, count):
        images = [canonical_representative(q, apply(pmap, p)).representative for p in orbit(q, v)]
        if any(np.max(np.abs(img - images[0])) > atol for img in images[1:]):
            return False
    return True


def same_quotient_map(q, m1, m2, tol=EQUAL_TOL):
    """True iff ``m2`` is proportional to ``B^k m1`` for some deck power ``k``."""
    for m in (m1, m2):
        if not descends(q, m).descends:
            raise InvalidInputError("same_quotient_map needs maps that descend to the quotient")
    A1 = _matrix(m1)
    A2 = _matrix(m2)
    return any(projective_distance(P @ A1, A2) < tol for P in q.deck_group())
