import numpy as np
import pytest

from mkflats.geometry import best_l2_subspace, principal_angles
from mkflats.initializers import random_init
from mkflats.kflats import kflats_fit, kflats_with_restarts
from mkflats.scoring import misclassification_rate
from mkflats.synth import generate_hlm


def test_truth_init_on_noiseless_lines():
    e = np.eye(3)
    X = np.vstack([np.outer(np.linspace(-1, 1, 20), e[0]), np.outer(np.linspace(-2, 2, 20), e[1])])
    truth = np.repeat([0, 1], 20)
    rep = kflats_fit(X, 2, 1, np.array([[e[0]], [e[1]]]))
    assert misclassification_rate(rep.labels, truth) == 0
    assert rep.l2_energy <= 1e-24 and rep.converged


@pytest.mark.parametrize("seed", range(5))
def test_energy_never_increases(seed):
    ds = generate_hlm(3, 2, 6, n_per=60, outlier_frac=0.3, seed=seed)
    rng = np.random.default_rng(seed)
    rep = kflats_fit(ds.points, 3, 2, random_init(3, 2, 6, rng), rng=rng)
    h = np.array(rep.energy_history)
    assert np.all(np.diff(h) <= 1e-12 * h[:-1])


def test_single_cluster_is_pca(rng):
    X = rng.standard_normal((50, 5)) * [3, 2, 1, 0.5, 0.1]
    rep = kflats_fit(X, 1, 2, random_init(1, 2, 5, rng))
    assert np.max(principal_angles(rep.bases[0], best_l2_subspace(X, 2))) < 1e-8


def test_empty_cluster_reseeded(rng):
    X = np.outer(rng.uniform(-1, 1, 30), [1.0, 0, 0]) + 0.01 * rng.standard_normal((30, 3))
    init = np.array([[[1.0, 0, 0]], [[1.0, 0, 0]]])
    rep = kflats_fit(X, 2, 1, init, rng=rng)
    assert rep.bases.shape == (2, 1, 3)


class TestRestarts:
    def test_single_restart_equals_fit(self):
        from mkflats.initializers import seed_bases
        from mkflats.mkf import init_rng
        ds = generate_hlm(2, 1, 3, n_per=50, seed=3)
        rep = kflats_with_restarts(ds.points, 2, 1, 1, "random", seed=8)
        rng = init_rng(8)
        single = kflats_fit(ds.points, 2, 1, seed_bases(ds.points, 2, 1, rng, "random"), rng=rng)
        np.testing.assert_array_equal(rep.labels, single.labels)
        assert rep.l2_energy == single.l2_energy

    def test_best_of_restarts(self):
        ds = generate_hlm(2, 2, 5, n_per=60, outlier_frac=0.2, seed=1)
        rep = kflats_with_restarts(ds.points, 2, 2, 6, seed=2)
        assert rep.l2_energy == min(rep.restart_l2) and len(rep.restart_l2) == 6

    def test_sphere_option(self):
        ds = generate_hlm(2, 1, 3, n_per=50, sigma_frac=0, outlier_frac=0, seed=4)
        rep = kflats_with_restarts(ds.points, 2, 1, 5, "nn", sphere=True)
        assert misclassification_rate(rep.labels, ds.truth) == 0
