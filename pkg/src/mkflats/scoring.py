"""Misclassification under the best label bijection, and trial summaries."""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import EmptyTrialsError, NoInliersError
from .synth import OUTLIER


def confusion(pred, truth):
    """Square count matrix C[p, t] over inlier positions (labels are 0-based)."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("pred and truth must have the same length")
    keep = truth != OUTLIER
    if not keep.any():
        raise NoInliersError("truth contains no inliers")
    p, t = pred[keep], truth[keep]
    size = int(max(p.max(), t.max())) + 1
    C = np.zeros((size, size), dtype=np.int64)
    np.add.at(C, (p, t), 1)
    return C


def misclassification_rate(pred, truth):
    """Fraction of inliers mislabelled under the best bijective relabelling."""
    C = confusion(pred, truth)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return 1.0 - C[rows, cols].sum() / C.sum()


def misclassification_rate_exhaustive(pred, truth):
    """Same quantity by trying every permutation; only practical for small K."""
    C = confusion(pred, truth)
    k = C.shape[0]
    best = max(sum(C[i, perm[i]] for i in range(k)) for perm in itertools.permutations(range(k)))
    return 1.0 - best / C.sum()


@dataclass
class Summary:
    mean: float
    median: float
    std: float
    mean_runtime: float


def aggregate(rates, runtimes=None):
    """Mean, median, sample std (n-1) of per-trial rates, plus mean runtime.

    A single trial reports std 0.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0:
        raise EmptyTrialsError("no trials to aggregate")
    std = float(np.std(rates, ddof=1)) if rates.size > 1 else 0.0
    runtime = float(np.mean(runtimes)) if runtimes is not None and len(runtimes) else float("nan")
    return Summary(float(np.mean(rates)), float(np.median(rates)), std, runtime)
