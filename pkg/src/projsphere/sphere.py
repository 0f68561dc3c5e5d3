"""The round sphere S^n in R^(n+1) and its projective transformations.

An invertible matrix A acts by ``v -> Av / |Av|``; proportional matrices
act identically, so a :class:`ProjectiveMap` is a matrix up to a nonzero
scalar.  Trace-free matrices give projective vector fields whose flows are
``exp(tau A)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .numkernel import as_matrix, as_vector, determinant, matrix_exp, plane_fit

SPHERE_TOL = 1e-12
EQUAL_TOL = 1e-9
DEFAULT_SAMPLES = 64


def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def as_sphere_point(v, tol=SPHERE_TOL):
    x = as_vector(v, name="sphere point")
    if abs(np.linalg.norm(x) - 1.0) > tol:
        raise InvalidInputError(f"point is not on the unit sphere (|v| = {np.linalg.norm(x)!r})")
    return x


def random_sphere_points(rng, n, count):
    """``count`` seeded points, uniform on S^n (normalized Gaussians)."""
    return normalize(rng.normal(size=(count, n + 1)))


def random_tangent(rng, x):
    """Seeded unit tangent vector at ``x``."""
    while True:
        t = rng.normal(size=x.shape)
        t = t - np.dot(t, x) * x
        nt = np.linalg.norm(t)
        if nt > 1e-3:
            return t / nt


@dataclass(frozen=True)
class GreatCircle:
    u: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = as_vector(self.u)
        w = as_vector(self.w)
        if u.shape != w.shape:
            raise InvalidInputError("great circle frame vectors differ in dimension")
        gram = np.array([[u @ u, u @ w], [w @ u, w @ w]])
        if np.max(np.abs(gram - np.eye(2))) > SPHERE_TOL:
            raise InvalidInputError("great circle frame is not orthonormal")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_spanning(cls, a, b):
        """Great circle through the plane spanned by ``a`` and ``b`` (Gram-Schmidt)."""
        u = normalize(as_vector(a))
        w = as_vector(b) - np.dot(b, u) * u
        w = w - np.dot(w, u) * u
        return cls(u, normalize(w))

    @property
    def dim(self):
        return self.u.shape[0]

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.cos(theta)[..., None] * self.u + np.sin(theta)[..., None] * self.w

    def sample(self, count=DEFAULT_SAMPLES, *, closed=False):
        """Points at uniformly spaced angles; ``closed`` repeats the start point."""
        if closed:
            theta = np.linspace(0.0, 2 * np.pi, count)
        else:
            theta = np.arange(count) * (2 * np.pi / count)
        return self.point(theta)


def random_great_circle(rng, n):
    a, b = rng.normal(size=(2, n + 1))
    return GreatCircle.from_spanning(a, b)


@dataclass(frozen=True)
class ProjectiveMap:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = as_matrix(self.matrix, square=True)
        if abs(determinant(A)) <= 1e-12:
            raise InvalidInputError("projective map matrix is singular")
        object.__setattr__(self, "matrix", A)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, v):
        return apply(self, v)

    def compose(self, other):
        """``self o other``."""
        return ProjectiveMap(self.matrix @ other.matrix)

    def inverse(self):
        return ProjectiveMap(np.linalg.inv(self.matrix))


def identity_map(size):
    return ProjectiveMap(np.eye(size))


def random_projective_matrix(rng, n, *, min_det=0.1):
    """Seeded Gaussian matrix in SL(n+1).

    Re-drawn while ``|det| < min_det``; a negative determinant is fixed by
    flipping the first row, then the matrix is scaled to determinant one.
    """
    size = n + 1
    while True:
        A = rng.normal(size=(size, size))
        d = np.linalg.det(A)
        if abs(d) >= min_det:
            break
    if d < 0:
        A[0] = -A[0]
        d = -d
    return A / d ** (1.0 / size)


def apply(pmap, v):
    """``Av / |Av|``; accepts a single point or an array of points (rows)."""
    A = pmap.matrix if isinstance(pmap, ProjectiveMap) else as_matrix(pmap, square=True)
    x = np.asarray(v, dtype=float)
    return normalize(x @ A.T)


def map_great_circle(pmap, gc, samples=DEFAULT_SAMPLES):
    """Image of ``samples`` points of ``gc`` and its plane-fit residual."""
    if samples < 8:
        raise InvalidInputError(f"samples must be at least 8, got {samples}")
    pts = apply(pmap, gc.sample(samples))
    _, residual = plane_fit(pts)
    return pts, residual


def map_points_residual(fn, gc, samples=DEFAULT_SAMPLES):
    """Plane-fit residual of ``fn`` applied pointwise to samples of ``gc``.

    ``fn`` is any map of the sphere to itself; used for negative controls
    with maps that are not projective.
    """
    pts = np.array([fn(p) for p in gc.sample(samples)])
    _, residual = plane_fit(pts)
    return pts, residual


@dataclass(frozen=True)
class ProjectiveVectorField:
    generator: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = as_matrix(self.generator, square=True, name="generator")
        if abs(np.trace(A)) > 1e-10:
            raise InvalidInputError(f"generator is not trace-free (trace {np.trace(A):.3e})")
        object.__setattr__(self, "generator", A)

    def __call__(self, x):
        return vector_field_at(self, x)


def vector_field_at(field_, x):
    """Tangential part ``Ax - <x, Ax> x`` of the linear field at ``x``."""
    A = field_.generator if isinstance(field_, ProjectiveVectorField) else as_matrix(field_)
    x = np.asarray(x, dtype=float)
    Ax = x @ A.T
    radial = np.sum(x * Ax, axis=-1, keepdims=True)
    return Ax - radial * x


def flow(field_, tau):
    """Projective map ``exp(tau * generator)`` at time ``tau``."""
    return ProjectiveMap(matrix_exp(field_.generator, tau))


def _unit_frobenius(A):
    return A / np.linalg.norm(A)


def projective_distance(m1, m2):
    """``min_sign |A1/|A1| -+ A2/|A2||`` in the Frobenius norm."""
    A1 = _unit_frobenius(m1.matrix if isinstance(m1, ProjectiveMap) else as_matrix(m1))
    A2 = _unit_frobenius(m2.matrix if isinstance(m2, ProjectiveMap) else as_matrix(m2))
    if A1.shape != A2.shape:
        raise InvalidInputError(f"dimension mismatch {A1.shape} vs {A2.shape}")
    return float(min(np.linalg.norm(A1 - A2), np.linalg.norm(A1 + A2)))


def projective_maps_equal(m1, m2, tol=EQUAL_TOL):
    """True iff the two matrices are proportional (within ``tol`` after normalization)."""
    return projective_distance(m1, m2) < tol
