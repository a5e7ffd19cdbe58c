"""Starting subspaces for the fitters: Haar-random and farthest insertion."""

import numpy as np

from .exceptions import InitializationError, InsufficientDataError, InvalidDimError, RankDeficientError
from .geometry import ZERO_NORM, best_l2_subspace, orthonormalize


def random_basis(d, D, rng):
    """Orthonormalized d x D Gaussian matrix; its row space is Haar distributed."""
    if not 1 <= d < D:
        raise InvalidDimError(f"need 1 <= d < D, got d={d}, D={D}")
    while True:
        try:
            return orthonormalize(rng.standard_normal((d, D)))
        except RankDeficientError:
            continue


def random_init(K, d, D, rng):
    return np.stack([random_basis(d, D, rng) for _ in range(K)])


def neighborhood_size(points, center, d, rank_tol=1e-6, order=None):
    """Smallest j such that the j nearest neighbours of ``points[center]``,
    shifted by that point, span a d-dimensional space.

    Rank is numerical: singular values above ``rank_tol`` times the largest.
    """
    x = points[center]
    if order is None:
        order = _neighbour_order(points, center)
    N = points.shape[0]
    for j in range(d, N):
        diffs = points[order[:j]] - x
        s = np.linalg.svd(diffs, compute_uv=False)
        if s[0] > 0 and np.count_nonzero(s > rank_tol * s[0]) >= d:
            return j
    raise InitializationError(
        f"neighbourhood of point {center} never reaches dimension {d}; the data are too degenerate")


def farthest_insertion_init(points, K, d, rng, rank_tol=1e-6):
    """Seed K linear d-subspaces by farthest insertion.

    The first seed point is drawn uniformly; each later seed is the point
    whose smallest residual to the subspaces built so far is largest. The
    subspace for a seed is the un-centered top-d PCA of the seed together
    with its j nearest neighbours, j being the smallest neighbourhood whose
    difference vectors reach rank d.

    Neighbours are found by Euclidean distance in the coordinates given, so
    pass the data before projecting onto the sphere when that is available.
    """
    return _farthest_insertion(points, K, d, rng, rank_tol)[0]


def _farthest_insertion(points, K, d, rng, rank_tol):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    N, D = points.shape
    if N < K * (d + 1):
        raise InsufficientDataError(f"farthest insertion needs at least K*(d+1) = {K * (d + 1)} points, got {N}")
    if not 1 <= d < D:
        raise InvalidDimError(f"need 1 <= d < D, got d={d}, D={D}")

    norms = np.linalg.norm(points, axis=1)
    unit = points / np.maximum(norms, ZERO_NORM)[:, None]
    bases, seeds = [], []
    min_res = np.full(N, np.inf)
    for i in range(K):
        if i == 0:
            seed = int(rng.integers(N))
        else:
            seed = int(np.argmax(min_res))
        order = _neighbour_order(points, seed)
        j = neighborhood_size(points, seed, d, rank_tol, order)
        neighbourhood = np.vstack([points[seed], points[order[:j]]])
        try:
            P = best_l2_subspace(neighbourhood, d, tol=0.0)
        except RankDeficientError as err:
            raise InitializationError(str(err)) from err
        bases.append(P)
        res = np.linalg.norm(unit - (unit @ P.T) @ P, axis=1)
        min_res = np.minimum(min_res, res)
        seeds.append(seed)
    return np.stack(bases), seeds


def seed_bases(points, K, d, rng, mode):
    """Dispatch on the initializer name used by the CLI ('random' or 'nn')."""
    if mode == "random":
        return random_init(K, d, points.shape[1], rng)
    if mode == "nn":
        return farthest_insertion_init(points, K, d, rng)
    raise ValueError(f"unknown init mode {mode!r}")


def _neighbour_order(points, center):
    dist = np.linalg.norm(points - points[center], axis=1)
    dist[center] = np.inf
    # stable so equidistant neighbours are taken in index order
    return np.argsort(dist, kind="stable")[:-1]
