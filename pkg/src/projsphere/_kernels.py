"""Hot numeric kernels with a numba path and a pure-numpy path.

Both variants are built from :func:`build_kernels`.  The module-level
``kernels`` object is the one the rest of the package calls; it is the
numba build unless ``PROJSPHERE_DISABLE_NUMBA`` is set to a truthy value
(or numba cannot be imported), in which case the plain numpy build is used.

Most kernels share one source and are simply compiled or not.  The discrete
Frechet recurrence is the exception: the compiled variant is a plain double
loop, while the numpy variant sweeps anti-diagonals so that every step is a
vectorized array operation.
"""

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
    from numba.extending import register_jitable
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

ENV_FLAG = "PROJSPHERE_DISABLE_NUMBA"


def numba_disabled():
    value = os.environ.get(ENV_FLAG, "").strip().lower()
    return numba is None or value not in ("", "0", "false", "no")


def _jitable(fn):
    # callable from plain Python and from numba-compiled code alike
    return register_jitable(fn) if numba is not None else fn


def elimination_rank(M, tol):
    # Gaussian elimination with partial pivoting; a pivot counts when it
    # exceeds tol times the largest absolute entry of the input.
    A = M.copy()
    m, n = A.shape
    scale = np.max(np.abs(A))
    if scale == 0.0:
        return 0
    thresh = tol * scale
    rank = 0
    row = 0
    for col in range(n):
        if row >= m:
            break
        p = row + np.argmax(np.abs(A[row:, col]))
        if abs(A[p, col]) <= thresh:
            A[row:, col] = 0.0
            continue
        if p != row:
            tmp = A[row, :].copy()
            A[row, :] = A[p, :]
            A[p, :] = tmp
        pivot = A[row, col]
        factors = A[row + 1:, col] / pivot
        A[row + 1:, :] -= np.outer(factors, A[row, :])
        A[row + 1:, col] = 0.0
        rank += 1
        row += 1
    return rank


def lu_det(M):
    A = M.copy()
    n = A.shape[0]
    det = 1.0
    for col in range(n):
        p = col + np.argmax(np.abs(A[col:, col]))
        if A[p, col] == 0.0:
            return 0.0
        if p != col:
            tmp = A[col, :].copy()
            A[col, :] = A[p, :]
            A[p, :] = tmp
            det = -det
        pivot = A[col, col]
        det *= pivot
        factors = A[col + 1:, col] / pivot
        A[col + 1:, :] -= np.outer(factors, A[col, :])
    return det


@_jitable
def randers_accel(x, v, w, C):
    # Constrained Euler-Lagrange equations of L = F^2/2 with
    # F = |v| + <w + Cx, v>, on the constraint |x| = 1.
    # Unknowns (a, mu):  H a - mu x = -2 F C v,   <x, a> = -|v|^2.
    d = x.shape[0]
    s = np.sqrt(np.dot(v, v))
    u = v / s
    b = w + np.dot(C, x)
    F = s + np.dot(b, v)
    ub = u + b
    K = np.zeros((d + 1, d + 1))
    K[:d, :d] = np.outer(ub, ub) + (F / s) * (np.eye(d) - np.outer(u, u))
    K[:d, d] = -x
    K[d, :d] = x
    rhs = np.empty(d + 1)
    rhs[:d] = -2.0 * F * np.dot(C, v)
    rhs[d] = -s * s
    sol = np.linalg.solve(K, rhs)
    return sol[:d]


def rk4_randers(x0, v0, w, C, dt, n_steps):
    d = x0.shape[0]
    xs = np.empty((n_steps + 1, d))
    vs = np.empty((n_steps + 1, d))
    x = x0.copy()
    v = v0.copy()
    xs[0] = x
    vs[0] = v
    h2 = 0.5 * dt
    for k in range(n_steps):
        a1 = randers_accel(x, v, w, C)
        x2 = x + h2 * v
        v2 = v + h2 * a1
        a2 = randers_accel(x2, v2, w, C)
        x3 = x + h2 * v2
        v3 = v + h2 * a2
        a3 = randers_accel(x3, v3, w, C)
        x4 = x + dt * v3
        v4 = v + dt * a3
        a4 = randers_accel(x4, v4, w, C)
        x = x + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        # back onto the constraint: unit point, tangential velocity
        x = x / np.sqrt(np.dot(x, x))
        v = v - np.dot(v, x) * x
        xs[k + 1] = x
        vs[k + 1] = v
    return xs, vs


def frechet_loops(P, Q):
    p = P.shape[0]
    q = Q.shape[0]
    dim = P.shape[1]
    prev = np.empty(q)
    cur = np.empty(q)
    for i in range(p):
        for j in range(q):
            acc = 0.0
            for d in range(dim):  # scalar loop: no temporaries per cell
                diff = P[i, d] - Q[j, d]
                acc += diff * diff
            dist = np.sqrt(acc)
            if i == 0 and j == 0:
                best = dist
            elif i == 0:
                best = max(cur[j - 1], dist)
            elif j == 0:
                best = max(prev[j], dist)
            else:
                best = max(min(prev[j], prev[j - 1], cur[j - 1]), dist)
            cur[j] = best
        prev, cur = cur, prev
    return prev[q - 1]


def frechet_diagonals(P, Q):
    p = P.shape[0]
    q = Q.shape[0]
    # diagonals indexed by i + 1; slot 0 is an infinite sentinel
    prev2 = np.full(p + 1, np.inf)
    prev1 = np.full(p + 1, np.inf)
    for k in range(p + q - 1):
        lo = max(0, k - q + 1)
        hi = min(k, p - 1)
        i = np.arange(lo, hi + 1)
        j = k - i
        dist = np.sqrt(np.sum((P[i] - Q[j]) ** 2, axis=1))
        cur = np.full(p + 1, np.inf)
        if k == 0:
            cur[1] = dist[0]
        else:
            up = prev1[i]        # (i - 1, j)
            left = prev1[i + 1]  # (i, j - 1)
            diag = prev2[i]      # (i - 1, j - 1)
            cur[i + 1] = np.maximum(np.minimum(np.minimum(up, left), diag), dist)
        prev2, prev1 = prev1, cur
    return float(prev1[p])


_JIT_CACHE = {}


def build_kernels(jit):
    """Return a namespace of kernels, compiled with numba when ``jit`` is true."""
    if not jit:
        return SimpleNamespace(
            jit=False,
            elimination_rank=elimination_rank,
            lu_det=lu_det,
            randers_accel=randers_accel,
            rk4_randers=rk4_randers,
            frechet=frechet_diagonals,
        )
    if numba is None:
        raise RuntimeError("numba is not available")
    if not _JIT_CACHE:
        nj = numba.njit(cache=True)
        _JIT_CACHE.update(
            elimination_rank=nj(elimination_rank),
            lu_det=nj(lu_det),
            randers_accel=nj(randers_accel),
            rk4_randers=nj(rk4_randers),
            frechet=nj(frechet_loops),
        )
    return SimpleNamespace(jit=True, **_JIT_CACHE)


kernels = build_kernels(jit=not numba_disabled())
