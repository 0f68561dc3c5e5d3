"""Randers metrics ``F(x, xi) = |xi| + omega_x(xi)`` on the round sphere.

The 1-form is given by ambient data: ``omega_x(xi) = <w + Cx, xi>`` with a
constant covector ``w`` (an exact form, the differential of ``<w, x>``) and a
skew matrix ``C`` (generically not closed).  Geodesics are integrated in
ambient coordinates from the Euler-Lagrange equations of ``F^2 / 2`` with
the sphere constraint enforced by a Lagrange multiplier.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from ._kernels import kernels
from .errors import (
    DegenerateInputError,
    EnergyDriftError,
    FinslerConditionError,
    InvalidInputError,
)
from .numkernel import as_matrix, as_vector
from .sphere import as_sphere_point, normalize, random_sphere_points

FINSLER_MARGIN = 1e-6
SKEW_TOL = 1e-12
TANGENT_TOL = 1e-10
DEFAULT_DT = 1e-3
DRIFT_TOL = 1e-6
EQUAL_TOL = 1e-5
RESAMPLE_COUNT = 1024


@dataclass(frozen=True)
class RandersData:
    n: int
    w: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise InvalidInputError(f"n must be an integer >= 2, got {self.n!r}")
        size = int(self.n) + 1
        w = as_vector(self.w, name="w")
        C = as_matrix(self.C, square=True, name="C")
        if w.shape != (size,) or C.shape != (size, size):
            raise InvalidInputError(
                f"expected w of length {size} and C of shape {size}x{size}, "
                f"got {w.shape} and {C.shape}"
            )
        skew = float(np.max(np.abs(C + C.T)))
        if skew > SKEW_TOL:
            raise InvalidInputError(f"C is not skew-symmetric (max |C + C^T| = {skew:.3e})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "w", np.ascontiguousarray(w))
        object.__setattr__(self, "C", np.ascontiguousarray(C))

    @classmethod
    def make(cls, n, w=None, C=None):
        size = n + 1
        return cls(
            n,
            np.zeros(size) if w is None else w,
            np.zeros((size, size)) if C is None else C,
        )

    @property
    def is_exact(self):
        """True when the skew part vanishes, so omega is exact (hence closed)."""
        return not np.any(self.C)


def omega_norm(m, x):
    """g-norm of omega at the point(s) ``x``: ``|w - <w, x> x + Cx|``."""
    x = np.asarray(x, dtype=float)
    wx = x @ m.w
    t = m.w - wx[..., None] * x + x @ m.C.T
    return np.linalg.norm(t, axis=-1)


class FinslerCheck(NamedTuple):
    valid: bool
    max_norm: float


def validate_finsler(m, samples=10_000, *, seed=0, refine=True):
    """Estimate ``sup_x |omega_x|_g`` and compare it against one.

    The supremum is estimated on ``samples`` seeded uniform points; with
    ``refine`` the best few samples are then polished by local maximization.
    Valid iff the estimate is below ``1 - 1e-6``.
    """
    if samples < 100:
        raise InvalidInputError(f"samples must be at least 100, got {samples}")
    rng = np.random.default_rng(seed)
    pts = random_sphere_points(rng, m.n, samples)
    norms = omega_norm(m, pts)
    best = float(np.max(norms))
    if refine and (np.any(m.w) or np.any(m.C)):
        def neg_sq(y):
            return -omega_norm(m, y / np.linalg.norm(y)) ** 2

        for idx in np.argsort(norms)[-5:]:
            res = minimize(neg_sq, pts[idx], method="BFGS", options={"gtol": 1e-12})
            best = max(best, float(np.sqrt(max(-res.fun, 0.0))))
    return FinslerCheck(best < 1.0 - FINSLER_MARGIN, best)


def require_finsler(m, samples=2000, *, seed=0):
    check = validate_finsler(m, samples, seed=seed)
    if not check.valid:
        raise FinslerConditionError(
            f"omega has g-norm up to {check.max_norm:.6g}; must stay below 1",
            max_norm=check.max_norm,
        )
    return check


def _F(m, x, v):
    return np.linalg.norm(v, axis=-1) + v @ m.w + np.sum((x @ m.C.T) * v, axis=-1)


def evaluate_F(m, x, xi):
    """``|xi| + <w, xi> + <Cx, xi>`` for a nonzero tangent vector ``xi`` at ``x``."""
    x = as_sphere_point(x, tol=1e-10)
    xi = as_vector(xi, name="xi")
    nxi = np.linalg.norm(xi)
    if nxi == 0.0:
        raise InvalidInputError("F is evaluated on nonzero vectors only")
    if abs(np.dot(x, xi)) > TANGENT_TOL * max(nxi, 1.0):
        raise InvalidInputError("xi is not tangent to the sphere at x")
    return float(nxi + np.dot(m.w, xi) + np.dot(m.C @ x, xi))


@dataclass(frozen=True)
class GeodesicCurve:
    times: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    velocities: np.ndarray = field(repr=False)
    speeds: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.times) < 2 or not (len(self.times) == len(self.points) == len(self.velocities)):
            raise InvalidInputError("geodesic curve needs >= 2 samples of equal length")

    @property
    def energy_drift(self):
        return float(np.max(np.abs(self.speeds - self.speeds[0])))

    def reversed(self):
        return GeodesicCurve(
            self.times[-1] - self.times[::-1],
            self.points[::-1].copy(),
            -self.velocities[::-1],
            self.speeds[::-1].copy(),
        )


def integrate_geodesic(m, x0, v0, t_max, dt=DEFAULT_DT, *, drift_tol=DRIFT_TOL, check_finsler=True):
    """Forward geodesic of ``m`` from ``(x0, v0)`` over ``[0, t_max]`` by fixed-step RK4.

    The step is shrunk to ``t_max / ceil(t_max / dt)`` so the last sample
    lands on ``t_max``.  After each step the point is renormalized and the
    velocity projected to the tangent space.  Solutions have constant F,
    and a drift above ``drift_tol`` raises :class:`EnergyDriftError`.
    """
    x0 = as_sphere_point(x0, tol=1e-10)
    v0 = as_vector(v0, name="v0")
    if x0.shape != (m.n + 1,) or v0.shape != x0.shape:
        raise InvalidInputError("initial data dimension does not match the metric")
    if abs(np.dot(x0, v0)) > TANGENT_TOL * max(np.linalg.norm(v0), 1.0):
        raise InvalidInputError("v0 is not tangent at x0")
    if not (t_max > 0 and 0 < dt <= t_max / 10):
        raise InvalidInputError(f"need 0 < dt <= t_max / 10, got dt={dt}, t_max={t_max}")
    if check_finsler:
        require_finsler(m)
    if np.linalg.norm(v0) == 0.0 or float(_F(m, x0, v0)) <= 1e-8:
        raise DegenerateInputError("initial velocity is zero or on the boundary of the forward cone")
    n_steps = int(np.ceil(t_max / dt - 1e-9))
    h = t_max / n_steps
    xs, vs = kernels.rk4_randers(
        np.ascontiguousarray(x0), np.ascontiguousarray(v0, dtype=float), m.w, m.C, h, n_steps
    )
    speeds = _F(m, xs, vs)
    curve = GeodesicCurve(np.linspace(0.0, t_max, n_steps + 1), xs, vs, speeds)
    drift = curve.energy_drift
    if drift > drift_tol:
        raise EnergyDriftError(f"F drifted by {drift:.3e} along the geodesic", drift=drift)
    return curve


def great_circle_arc(x0, v0, angle, count):
    """``count`` points of the unit-speed great circle from ``x0`` toward ``v0``."""
    x0 = np.asarray(x0, dtype=float)
    u = normalize(np.asarray(v0, dtype=float))
    theta = np.linspace(0.0, angle, count)
    return np.cos(theta)[:, None] * x0 + np.sin(theta)[:, None] * u


def _chord_angles(P):
    chords = np.linalg.norm(np.diff(P, axis=0), axis=1)
    return 2.0 * np.arcsin(np.clip(chords / 2.0, 0.0, 1.0))


def spherical_length(points):
    P = np.asarray(points, dtype=float)
    return float(np.sum(_chord_angles(P)))


def resample_arclength(points, count=RESAMPLE_COUNT):
    """Resample a spherical polyline at ``count`` points equally spaced in arc length.

    Consecutive samples are joined by great-circle arcs (slerp), so a
    polyline whose vertices lie on one great circle is reproduced exactly.
    """
    P = np.asarray(points, dtype=float)
    ang = _chord_angles(P)
    keep = np.concatenate([[True], ang > 0.0])
    P = P[keep]
    ang = ang[ang > 0.0]
    if len(P) < 2:
        return np.repeat(P[:1], count, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(ang)])
    s = np.linspace(0.0, cum[-1], count)
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(ang) - 1)
    theta = ang[k]
    f = (s - cum[k]) / theta
    sin_t = np.sin(theta)
    a = np.sin((1.0 - f) * theta) / sin_t
    b = np.sin(f * theta) / sin_t
    return normalize(a[:, None] * P[k] + b[:, None] * P[k + 1])


def frechet_distance(P, Q):
    """Discrete Frechet distance (chordal) between two point sequences."""
    P = np.ascontiguousarray(as_matrix(P, name="P"))
    Q = np.ascontiguousarray(as_matrix(Q, name="Q"))
    if P.shape[1] != Q.shape[1]:
        raise InvalidInputError("point sequences live in different dimensions")
    return float(kernels.frechet(P, Q))


def _points(c):
    return c.points if isinstance(c, GeodesicCurve) else np.asarray(c, dtype=float)


def curves_projectively_equal(c1, c2, tol=EQUAL_TOL, *, resample=RESAMPLE_COUNT):
    """Compare two curves as unparametrized paths.

    Both are resampled uniformly in spherical arc length and compared with
    the discrete Frechet distance; the second curve is tried in both
    orientations and the smaller distance is kept.  Returns
    ``(distance < tol, distance)``.
    """
    P = _points(c1)
    Q = _points(c2)
    if len(P) == 0 or len(Q) == 0:
        raise InvalidInputError("curves must be nonempty")
    if resample:
        P = resample_arclength(P, resample)
        Q = resample_arclength(Q, resample)
    d = min(frechet_distance(P, Q), frechet_distance(P, Q[::-1]))
    return d < tol, d


def deviation_from_great_circle(curve):
    """Frechet distance between a curve and the great circle of its initial data.

    The reference arc starts at the curve's first point in the direction of
    its first velocity and has the same spherical length.
    """
    P = _points(curve)
    v0 = curve.velocities[0] if isinstance(curve, GeodesicCurve) else P[1] - P[0]
    ref = great_circle_arc(P[0], v0 - np.dot(v0, P[0]) * P[0], spherical_length(P), max(len(P), 2))
    return curves_projectively_equal(P, ref)
