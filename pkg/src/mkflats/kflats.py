"""Classical l2 K-flats for linear subspaces (the comparison baseline)."""

import time

import numpy as np

from .exceptions import InsufficientDataError, InvalidParamsError, RankDeficientError
from .geometry import assign, normalize_to_sphere, orthonormalize, residuals
from .initializers import random_basis, seed_bases
from .mkf import FitReport, combine_restarts, init_rng, l1_energy, l2_energy, restart_seeds


def kflats_fit(points, K, d, init, max_rounds=300, rng=None):
    """Alternate nearest-subspace assignment and per-cluster PCA refits.

    Stops when the labels repeat or after ``max_rounds``. A cluster left
    empty is re-seeded with a subspace through the point of largest current
    residual; a cluster of rank below ``d`` gets its span completed with
    random orthogonal directions, which keeps its l2 cost at zero.
    ``energy_history`` holds the l2 energy after every refit.
    """
    points = np.asarray(points, dtype=float)
    N, D = points.shape
    if N < K * d:
        raise InsufficientDataError(f"need at least K*d = {K * d} points, got {N}")
    bases = np.array(init, dtype=float)
    if bases.shape != (K, d, D):
        raise InvalidParamsError(f"init has shape {bases.shape}, expected {(K, d, D)}")
    rng = rng if rng is not None else np.random.default_rng(0)

    t0 = time.perf_counter()
    labels = assign(points, bases)
    history = [l2_energy(points, labels, bases)]
    converged = False
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        res = residuals(points, bases)[np.arange(N), labels]
        for i in range(K):
            members = points[labels == i]
            if len(members) == 0:
                far = points[np.argmax(res)]
                bases[i] = _complete(far[None], d, rng)
            else:
                bases[i] = _fit_flat(members, d, rng)
        history.append(l2_energy(points, labels, bases))
        new_labels = assign(points, bases)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels

    return FitReport(
        labels=labels,
        l1_energy=l1_energy(points, labels, bases),
        l2_energy=l2_energy(points, labels, bases),
        iters=rounds,
        converged=converged,
        bases=bases,
        energy_history=history,
        wall_time=time.perf_counter() - t0,
    )


def kflats_with_restarts(points, K, d, n_restarts=30, init_mode="random", seed=0, max_rounds=300,
                         sphere=False):
    """Best-of-restarts K-flats, selected by l2 energy.

    By default the fit runs on the coordinates as given, which is the
    classical l2 baseline: far-away outliers weigh in quadratically. With
    ``sphere=True`` the points are first projected onto the unit sphere,
    as MKF does. Farthest-insertion seeding always uses the raw coordinates.
    """
    if n_restarts < 1:
        raise InvalidParamsError("n_restarts must be at least 1")
    raw = np.asarray(points, dtype=float)
    fit_points = normalize_to_sphere(raw) if sphere else raw
    t0 = time.perf_counter()
    reports = []
    for s in restart_seeds(seed, n_restarts):
        rng = init_rng(s)
        init = seed_bases(raw, K, d, rng, init_mode)
        reports.append(kflats_fit(fit_points, K, d, init, max_rounds, rng))
    return combine_restarts(reports, "l2", time.perf_counter() - t0)


def _fit_flat(members, d, rng):
    _, s, Vt = np.linalg.svd(members, full_matrices=False)
    rank = int(np.count_nonzero(s > 1e-10 * max(s[0], 1.0)))
    if rank >= d:
        return Vt[:d]
    return _complete(Vt[:rank], d, rng)


def _complete(rows, d, rng):
    """Extend orthonormal ``rows`` (rank r <= d) to an orthonormal d-frame."""
    D = rows.shape[1]
    rows = np.array(rows, dtype=float)
    try:
        rows = orthonormalize(rows)
    except RankDeficientError:
        return random_basis(d, D, rng)
    extra = rng.standard_normal((d - rows.shape[0], D))
    return orthonormalize(np.vstack([rows, extra]))
