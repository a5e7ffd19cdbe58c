"""Median K-flats: stochastic gradient descent on the l1 subspace energy.

Every iteration draws one point, finds the subspace with the largest
projection of that point and moves that subspace along the tangent part of
the point's l1-energy gradient, then re-orthonormalizes it. The whole-cloud
l1 energy is checked every ``check_interval`` iterations and the run stops
once two consecutive checks agree to within the ratio band.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .exceptions import InsufficientDataError, InvalidParamsError
from .geometry import assign, is_normalized, normalize_to_sphere, residuals, subspace_drift
from .initializers import random_basis, seed_bases


@dataclass(frozen=True)
class FitConfig:
    dt: float = 0.01
    check_interval: int = 1000
    band: tuple = (0.999, 1.001)
    max_iters: int = 100_000
    rng_seed: int = 0
    sing_floor: float = 1e-8
    # online stopping threshold on summed sin^2 of principal angles
    drift_tol: float = 1e-6

    def __post_init__(self):
        lo, hi = self.band
        if self.dt <= 0:
            raise InvalidParamsError(f"dt must be positive, got {self.dt}")
        if self.check_interval < 1:
            raise InvalidParamsError("check_interval must be at least 1")
        if not lo < 1 < hi:
            raise InvalidParamsError(f"band must bracket 1, got {self.band}")
        if self.max_iters < self.check_interval:
            raise InvalidParamsError("max_iters must be at least check_interval")


@dataclass
class ModelState:
    """Everything an SGD run carries between steps; never holds the data."""

    bases: np.ndarray
    config: FitConfig
    rng: np.random.Generator
    iters_done: int = 0
    energy_history: list = field(default_factory=list)
    checkpoint: np.ndarray = None
    drift_history: list = field(default_factory=list)
    stopped: bool = False

    @property
    def K(self):
        return self.bases.shape[0]

    @property
    def d(self):
        return self.bases.shape[1]

    @property
    def D(self):
        return self.bases.shape[2]


@dataclass
class FitReport:
    labels: np.ndarray
    l1_energy: float
    l2_energy: float
    iters: int
    converged: bool
    bases: np.ndarray = None
    energy_history: list = field(default_factory=list)
    restart_l1: list = field(default_factory=list)
    restart_l2: list = field(default_factory=list)
    restart_iters: list = field(default_factory=list)
    restart_converged: list = field(default_factory=list)
    wall_time: float = 0.0


def l1_energy(points, labels, bases):
    """Sum of (unsquared) distances from each point to its assigned subspace."""
    res = residuals(points, bases)
    return float(res[np.arange(len(res)), labels].sum())


def l2_energy(points, labels, bases):
    res = residuals(points, bases)
    return float((res[np.arange(len(res)), labels] ** 2).sum())


def gradient(P, x):
    """Tangent part of the single-point l1 gradient with respect to ``P``.

    Returns -(Px)(x - P^T P x)^T / |x - P^T P x|; its rows are orthogonal to
    the rows of ``P``.
    """
    u = P @ x
    w = x - u @ P
    return -np.outer(u, w) / np.linalg.norm(w)


def new_state(init, config):
    bases = np.array(init, dtype=np.float64, order="C")
    if bases.ndim != 3:
        raise InvalidParamsError("init must be a (K, d, D) stack of bases")
    return ModelState(bases=bases, config=config, rng=np.random.default_rng(config.rng_seed),
                      checkpoint=bases.copy())


def sgd_step(state, x, backend=None):
    """One stochastic update of ``state`` (in place) using the unit vector ``x``."""
    _sweep(state, np.atleast_2d(x), np.zeros(1, dtype=np.intp), backend)
    return state


def mkf_feed(state, x, backend=None):
    """Online interface: normalize a raw point, take one step, monitor drift."""
    x = normalize_to_sphere(x)
    sgd_step(state, x[0], backend)
    cfg = state.config
    if state.iters_done % cfg.check_interval == 0:
        drift = subspace_drift(state.checkpoint, state.bases)
        state.drift_history.append((state.iters_done, drift))
        state.checkpoint = state.bases.copy()
        if drift < cfg.drift_tol:
            state.stopped = True
    return state


def mkf_fit(points, K, d, config, init, backend=None):
    """Run SGD from ``init`` until the energy ratio settles or ``max_iters``.

    ``points`` must already lie on the unit sphere. Returns the final
    ``ModelState`` and a ``FitReport`` with 0-based labels.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    N = points.shape[0]
    if N < K * d:
        raise InsufficientDataError(f"need at least K*d = {K * d} points, got {N}")
    if not is_normalized(points, 1e-9):
        raise InvalidParamsError("points must be normalized to the unit sphere")
    init = np.asarray(init)
    if init.shape[:2] != (K, d) or init.shape[2] != points.shape[1]:
        raise InvalidParamsError(f"init has shape {init.shape}, expected {(K, d, points.shape[1])}")

    t0 = time.perf_counter()
    cfg = config
    state = new_state(init, cfg)
    state.energy_history.append((0, _energy(points, state.bases)))
    converged = False
    while state.iters_done < cfg.max_iters:
        n = min(cfg.check_interval, cfg.max_iters - state.iters_done)
        _sweep(state, points, state.rng.integers(N, size=n), backend)
        if state.iters_done % cfg.check_interval:
            break
        energy = _energy(points, state.bases)
        previous = state.energy_history[-1][1]
        state.energy_history.append((state.iters_done, energy))
        if _in_band(energy, previous, cfg.band):
            converged = True
            break

    labels = assign(points, state.bases)
    report = FitReport(
        labels=labels,
        l1_energy=l1_energy(points, labels, state.bases),
        l2_energy=l2_energy(points, labels, state.bases),
        iters=state.iters_done,
        converged=converged,
        bases=state.bases.copy(),
        energy_history=list(state.energy_history),
        wall_time=time.perf_counter() - t0,
    )
    return state, report


def restart_seeds(seed, n):
    """Seed for each restart; the first restart reuses ``seed`` itself."""
    seeds = [int(seed)]
    for r in range(1, n):
        ss = np.random.SeedSequence(int(seed), spawn_key=(r,))
        seeds.append(int(ss.generate_state(1, np.uint32)[0]))
    return seeds


def init_rng(seed):
    """Generator for drawing initial subspaces, independent of the sampling stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0,)))


def run_with_restarts(points, K, d, config, n_restarts=5, init_mode="random",
                      selection="l1", backend=None):
    """Fit from ``n_restarts`` independent starts and keep the best by l1 or l2 energy.

    ``points`` are raw coordinates; they are projected onto the sphere for
    fitting, while farthest-insertion seeding searches neighbours in the
    raw coordinates.
    """
    if n_restarts < 1:
        raise InvalidParamsError("n_restarts must be at least 1")
    if selection not in ("l1", "l2"):
        raise InvalidParamsError(f"selection must be 'l1' or 'l2', got {selection!r}")
    raw = np.asarray(points, dtype=float)
    unit = normalize_to_sphere(raw)
    t0 = time.perf_counter()
    reports = []
    for seed in restart_seeds(config.rng_seed, n_restarts):
        init = seed_bases(raw, K, d, init_rng(seed), init_mode)
        _, rep = mkf_fit(unit, K, d, replace(config, rng_seed=seed), init, backend)
        reports.append(rep)
    return combine_restarts(reports, selection, time.perf_counter() - t0)


def combine_restarts(reports, selection, wall_time):
    key = "l1_energy" if selection == "l1" else "l2_energy"
    best = min(reports, key=lambda rep: getattr(rep, key))
    return FitReport(
        labels=best.labels,
        l1_energy=best.l1_energy,
        l2_energy=best.l2_energy,
        iters=best.iters,
        converged=best.converged,
        bases=best.bases,
        energy_history=best.energy_history,
        restart_l1=[rep.l1_energy for rep in reports],
        restart_l2=[rep.l2_energy for rep in reports],
        restart_iters=[rep.iters for rep in reports],
        restart_converged=[rep.converged for rep in reports],
        wall_time=wall_time,
    )


def _energy(points, bases):
    return l1_energy(points, assign(points, bases), bases)


def _in_band(energy, previous, band):
    if previous == 0:
        return energy == 0
    lo, hi = band
    return lo < energy / previous < hi


def _sweep(state, X, order, backend):
    pos = 0
    n = len(order)
    cfg = state.config
    while pos < n:
        done, collapsed = _kernels.sgd_sweep(X, order[pos:], state.bases, cfg.dt, cfg.sing_floor,
                                             backend=backend)
        pos += done
        state.iters_done += done
        if collapsed >= 0:
            state.bases[collapsed] = random_basis(state.d, state.D, state.rng)
