"""Median K-flats (l1 subspace clustering by SGD) and the l2 K-flats baseline."""

from ._kernels import BACKEND
from .geometry import (
    best_l2_subspace,
    homogenize,
    nearest_subspace,
    normalize_to_sphere,
    orthonormalize,
    principal_angles,
    residual,
    svd_project,
)
from .initializers import farthest_insertion_init, random_init
from .kflats import kflats_fit, kflats_with_restarts
from .mkf import FitConfig, FitReport, ModelState, l1_energy, l2_energy, mkf_feed, mkf_fit, run_with_restarts, sgd_step
from .scoring import aggregate, misclassification_rate
from .synth import OUTLIER, LabeledDataset, generate_hlm

__version__ = "0.1.0"
