"""Linear-subspace primitives shared by the fitters.

A d-dimensional linear subspace of R^D is stored as a ``(d, D)`` array whose
rows are orthonormal; a collection of K subspaces is a ``(K, d, D)`` array.
Point clouds are ``(N, D)`` arrays, one point per row.
"""

import numpy as np

from .exceptions import InvalidDimError, RankDeficientError, ZeroVectorError

ZERO_NORM = 1e-12
RANK_TOL = 1e-10
ORTHO_TOL = 1e-10


def normalize_to_sphere(points):
    """Scale every row of ``points`` to unit Euclidean norm.

    Raises ZeroVectorError naming the first row whose norm is below 1e-12.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    norms = np.linalg.norm(points, axis=1)
    bad = np.flatnonzero(norms < ZERO_NORM)
    if bad.size:
        raise ZeroVectorError(int(bad[0]))
    return points / norms[:, None]


def is_normalized(points, tol=1e-12):
    norms = np.linalg.norm(np.atleast_2d(points), axis=1)
    return bool(np.all(np.abs(norms - 1.0) <= tol))


def is_orthonormal(P, tol=ORTHO_TOL):
    P = np.atleast_2d(P)
    return np.linalg.norm(P @ P.T - np.eye(P.shape[0])) <= tol


def residual(x, P):
    """Distance from the unit vector ``x`` to the row space of ``P``.

    On the sphere this equals sqrt(1 - |Px|^2); it is evaluated as the norm
    of the orthogonal component, which stays accurate for points lying on
    (or extremely near) the subspace where the square-root form loses about
    eight digits.
    """
    x = np.asarray(x, dtype=float)
    P = np.atleast_2d(P)
    r = np.linalg.norm(x - P.T @ (P @ x))
    return float(min(r, 1.0))


def residuals(points, bases):
    """Residuals of every point to every subspace, shape ``(N, K)``."""
    points = np.atleast_2d(points)
    bases = _as_stack(bases)
    coeffs = np.einsum("kad,nd->nka", bases, points)
    recon = np.einsum("nka,kad->nkd", coeffs, bases)
    return np.linalg.norm(points[:, None, :] - recon, axis=2)


def projection_norms(points, bases):
    """|P_i x|^2 for every point and subspace, shape ``(N, K)``."""
    coeffs = np.einsum("kad,nd->nka", _as_stack(bases), np.atleast_2d(points))
    return np.einsum("nka,nka->nk", coeffs, coeffs)


def nearest_subspace(x, bases):
    """Index (0-based) of the subspace maximizing |P_i x|; ties go to the lowest index."""
    return int(np.argmax(projection_norms(x, bases)[0]))


def assign(points, bases):
    """0-based nearest-subspace labels for every row of ``points``."""
    return np.argmax(projection_norms(points, bases), axis=1)


def orthonormalize(M, tol=RANK_TOL):
    """Row-wise modified Gram-Schmidt.

    The row space of ``M`` is preserved and the first row keeps its
    direction. Raises RankDeficientError when the smallest singular value
    of ``M`` is at or below ``tol``.
    """
    M = np.array(np.atleast_2d(M), dtype=float)
    d, D = M.shape
    if d == 0 or d > D or np.linalg.svd(M, compute_uv=False)[-1] <= tol:
        raise RankDeficientError(f"rows of the {d}x{D} matrix are not linearly independent")
    Q = M
    for a in range(d):
        for b in range(a):
            Q[a] -= (Q[a] @ Q[b]) * Q[b]
        Q[a] /= np.linalg.norm(Q[a])
    return Q


def principal_angles(P, Q):
    """Principal angles between two row-space subspaces, in non-decreasing order."""
    s = np.linalg.svd(np.atleast_2d(P) @ np.atleast_2d(Q).T, compute_uv=False)
    return np.arccos(np.clip(s, 0.0, 1.0))


def subspace_drift(old, new):
    """Sum over paired subspaces of the squared sines of their principal angles."""
    return float(sum(np.sum(np.sin(principal_angles(p, q)) ** 2)
                     for p, q in zip(_as_stack(old), _as_stack(new))))


def best_l2_subspace(points, d, tol=RANK_TOL):
    """Least-squares linear d-subspace: top-d right singular vectors, no centering."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise RankDeficientError("cannot fit a subspace to an empty point set")
    _, s, Vt = np.linalg.svd(points, full_matrices=False)
    if s.size < d or s[d - 1] <= tol:
        raise RankDeficientError(f"data rank is below {d}")
    return Vt[:d].copy()


def svd_project(points, m):
    """Coordinates of each point in the basis of the top-m right singular vectors."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    N, D = points.shape
    if not 1 <= m <= min(N, D):
        raise InvalidDimError(f"projection dimension {m} must lie in [1, {min(N, D)}]")
    _, _, Vt = np.linalg.svd(points, full_matrices=False)
    return points @ Vt[:m].T


def homogenize(points):
    """Append a constant 1 coordinate, then project onto the sphere."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    lifted = np.hstack([points, np.ones((points.shape[0], 1))])
    return normalize_to_sphere(lifted)


def _as_stack(bases):
    bases = np.asarray(bases, dtype=float)
    if bases.ndim == 2:
        bases = bases[None]
    return bases
