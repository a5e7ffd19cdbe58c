"""Synthetic hybrid linear models: points near K random subspaces plus cube outliers."""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParamsError
from .initializers import random_basis

OUTLIER = -1
NOISE_MODES = ("vector", "coordinate")


@dataclass
class LabeledDataset:
    points: np.ndarray
    truth: np.ndarray
    generating_bases: list
    params: dict

    @property
    def inliers(self):
        return self.truth != OUTLIER

    @property
    def n_outliers(self):
        return int(np.count_nonzero(self.truth == OUTLIER))


def outlier_count(n_inliers, outlier_frac):
    """Number of outliers so that they make up ``outlier_frac`` of the final total."""
    return int(round(outlier_frac / (1.0 - outlier_frac) * n_inliers))


def generate_hlm(K, dims, D, n_per=250, sigma_frac=0.05, outlier_frac=0.05, rng=None, seed=None,
                 noise="vector"):
    """Sample a hybrid linear model.

    For each of the K Haar-random subspaces (dimension ``dims[i]``), draw
    ``n_per`` points whose in-subspace coordinates are uniform on [-1, 1]^d
    and add Gaussian noise orthogonal to the subspace at scale
    ``sigma = sigma_frac * 2 * sqrt(d)`` (a fraction of the cube diameter).
    Outliers are uniform in [-R, R]^D with R the largest inlier norm.
    Labels are 0..K-1 for inliers and ``OUTLIER`` (-1) for outliers.

    ``noise`` fixes what sigma measures:

    * ``"vector"``: sigma is the RMS length of an isotropic ambient Gaussian
      (per-coordinate std sigma / sqrt(D)), of which only the part
      orthogonal to the subspace is kept.
    * ``"coordinate"``: every coordinate of the orthogonal complement has
      std sigma.
    """
    if isinstance(dims, int):
        dims = [dims] * K
    dims = [int(v) for v in dims]
    if len(dims) != K or K < 1:
        raise InvalidParamsError(f"expected {K} subspace dimensions, got {dims}")
    if min(dims) < 1 or max(dims) >= D:
        raise InvalidParamsError(f"every dimension must lie in [1, D-1] with D={D}, got {dims}")
    if n_per < 1:
        raise InvalidParamsError("n_per must be at least 1")
    if sigma_frac < 0 or not 0 <= outlier_frac < 1:
        raise InvalidParamsError("sigma_frac must be >= 0 and outlier_frac in [0, 1)")
    if noise not in NOISE_MODES:
        raise InvalidParamsError(f"noise must be one of {NOISE_MODES}, got {noise!r}")
    if rng is None:
        rng = np.random.default_rng(seed)

    bases, blocks, labels = [], [], []
    for i, d in enumerate(dims):
        B = random_basis(d, D, rng)
        coords = rng.uniform(-1.0, 1.0, size=(n_per, d))
        sigma = sigma_frac * 2.0 * np.sqrt(d)
        scale = sigma / np.sqrt(D) if noise == "vector" else sigma
        offsets = scale * rng.standard_normal((n_per, D))
        offsets -= (offsets @ B.T) @ B
        blocks.append(coords @ B + offsets)
        labels.append(np.full(n_per, i))
        bases.append(B)
    inliers = np.vstack(blocks)

    n_out = outlier_count(len(inliers), outlier_frac)
    R = float(np.max(np.linalg.norm(inliers, axis=1)))
    outliers = rng.uniform(-R, R, size=(n_out, D))
    points = np.vstack([inliers, outliers])
    truth = np.concatenate(labels + [np.full(n_out, OUTLIER)])
    params = dict(K=K, dims=dims, D=D, n_per=n_per, sigma_frac=sigma_frac,
                  outlier_frac=outlier_frac, seed=seed, noise=noise, cube_halfwidth=R)
    return LabeledDataset(points=points, truth=truth, generating_bases=bases, params=params)
