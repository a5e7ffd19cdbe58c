"""Acceptance criteria, one test each, at their stated tolerances.

Every test appends a PASS/FAIL line that the terminal summary repeats at
the end of the run.
"""

import json

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from mkflats.cli import main, run_bench
from mkflats.geometry import normalize_to_sphere, residual
from mkflats.initializers import random_basis, random_init
from mkflats.kflats import kflats_fit
from mkflats.mkf import FitConfig, gradient, mkf_fit
from mkflats.scoring import misclassification_rate, misclassification_rate_exhaustive
from mkflats.synth import generate_hlm

pytestmark = pytest.mark.slow

TRIALS = 20
SETTINGS = {
    1: (2, [10, 10], 15, ("mkf",)),
    2: (2, [15, 15], 20, ("mkf", "kf")),
    3: (3, [4, 5, 6], 10, ("mkf",)),
}


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def table_runs():
    return {n: run_bench(K, dims, D, 0.30, TRIALS, algos, seed=0) for n, (K, dims, D, algos) in SETTINGS.items()}


def test_criterion_1_ten_in_fifteen(table_runs):
    mean = table_runs[1]["mkf"]["mean"]
    record(1, mean <= 0.02, f"10^2 in R^15, 30% outliers: MKF mean error {100 * mean:.2f}% (bound 2%)")


def test_criterion_2_fifteen_in_twenty(table_runs):
    mkf, kf = table_runs[2]["mkf"]["mean"], table_runs[2]["kf"]["mean"]
    ok = mkf <= 0.03 and kf >= 10 * mkf
    record(2, ok, f"15^2 in R^20, 30% outliers: MKF {100 * mkf:.2f}% (bound 3%), KF {100 * kf:.2f}% "
                  f"(needs >= {100 * 10 * mkf:.2f}%)")


def test_criterion_3_mixed_dimensions(table_runs):
    mean = table_runs[3]["mkf"]["mean"]
    record(3, mean <= 0.05, f"(4,5,6) in R^10 at d=6, 30% outliers: MKF mean error {100 * mean:.2f}% (bound 5%)")


def test_criterion_4_iteration_budget(table_runs):
    parts, ok = [], True
    for n in SETTINGS:
        res = table_runs[n]["mkf"]
        flags = [c and it <= 30000
                 for its, conv in zip(res["restart_iters"], res["restart_converged"])
                 for it, c in zip(its, conv)]
        frac = sum(flags) / len(flags)
        ok &= frac >= 0.90
        parts.append(f"setting {n}: {100 * frac:.1f}%")
    record(4, ok, "converged within 3e4 iterations: " + ", ".join(parts) + " of restarts (bound 90%)")


def _random_pair(rng, k):
    D = int(rng.integers(2, 11))
    d = int(rng.integers(1, D))
    P = random_basis(d, D, rng)
    if k % 2:
        x = normalize_to_sphere(rng.standard_normal(D))[0]
    else:
        # residual log-uniform in [1e-3, 1]
        r = 10 ** rng.uniform(-3, 0)
        inside = normalize_to_sphere(rng.standard_normal(d) @ P)[0]
        out = rng.standard_normal(D)
        out = normalize_to_sphere(out - P.T @ (P @ out))[0]
        x = np.sqrt(1 - r * r) * inside + r * out
    return P, x


def test_criterion_5_gradient_oracle():
    rng = np.random.default_rng(5)
    worst_rel, worst_tan, count = 0.0, 0.0, 0
    while count < 1000:
        P, x = _random_pair(rng, count)
        r = residual(x, P)
        if r <= 1e-3:
            continue
        count += 1
        energy = lambda Q: np.sqrt(1 - np.sum((Q @ x) ** 2))
        # fourth-order central differences; perturbing one entry by h moves the
        # squared residual by O(h), so the step scales with r^2
        h = 1e-2 * r * r
        fd = np.empty_like(P)
        for idx in np.ndindex(P.shape):
            E = np.zeros_like(P)
            E[idx] = h
            fd[idx] = (energy(P - 2 * E) - 8 * energy(P - E) + 8 * energy(P + E) - energy(P + 2 * E)) / (12 * h)
        full = -np.outer(P @ x, x) / r
        tangent = gradient(P, x)
        worst_rel = max(worst_rel,
                        np.abs(full - fd).max() / np.abs(fd).max(),
                        np.abs(tangent - (fd - fd @ P.T @ P)).max() / np.abs(fd).max())
        worst_tan = max(worst_tan, np.abs(tangent @ P.T).max())
    ok = worst_rel <= 1e-5 and worst_tan <= 1e-12
    record(5, ok, f"1000 pairs: max relative gradient error {worst_rel:.2e} (bound 1e-5), "
                  f"max |(d_x P) P^T| {worst_tan:.2e} (bound 1e-12)")


def test_criterion_6_kflats_monotone():
    worst = -np.inf
    for seed in range(100):
        rng = np.random.default_rng(seed)
        D = int(rng.integers(3, 9))
        K = int(rng.integers(1, 4))
        d = int(rng.integers(1, D))
        ds = generate_hlm(K, d, D, n_per=int(rng.integers(20, 80)), outlier_frac=float(rng.uniform(0, 0.5)),
                          rng=rng)
        rep = kflats_fit(ds.points, K, d, random_init(K, d, D, rng), rng=rng)
        worst = max(worst, float(np.max(np.diff(rep.energy_history), initial=-np.inf)))
    record(6, worst <= 1e-12, f"100 instances: largest round-to-round l2 increase {worst:.3g} (bound 1e-12)")


def test_criterion_7_scoring_oracle():
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(500):
        K = int(rng.integers(1, 6))
        N = int(rng.integers(1, 40))
        truth = rng.integers(-1, K, size=N)
        truth[0] = rng.integers(K)
        pred = rng.integers(0, K, size=N)
        a = misclassification_rate(pred, truth)
        b = misclassification_rate_exhaustive(pred, truth)
        mismatches += a != b
    record(7, mismatches == 0, f"500 random pairs, K <= 5: {mismatches} disagreements with exhaustive search")


def test_criterion_8_clean_data_exact():
    failures = []
    worst = 0.0
    for seed in range(20):
        ds = generate_hlm(2, 2, 4, sigma_frac=0.0, outlier_frac=0.0, seed=seed)
        truth_bases = np.stack(ds.generating_bases)
        _, m = mkf_fit(normalize_to_sphere(ds.points), 2, 2, FitConfig(rng_seed=seed), truth_bases)
        k = kflats_fit(ds.points, 2, 2, truth_bases)
        errs = (misclassification_rate(m.labels, ds.truth), misclassification_rate(k.labels, ds.truth))
        worst = max(worst, m.l1_energy, k.l2_energy)
        if errs != (0, 0) or m.l1_energy > 1e-6 or k.l2_energy > 1e-6:
            failures.append(seed)
    record(8, not failures, f"2^2 in R^4, 20 seeds: failing seeds {failures}, largest final energy {worst:.2e} "
                            f"(bound 1e-6)")


def test_criterion_9_determinism(tmp_path):
    # same paths both times, since the fit record names its input file
    def run():
        assert main(["gen", "--setting", "d=2,K=2,D=4", "--outliers", "0.2", "--seed", "4", "--n-per", "80",
                     "--out", str(tmp_path / "x.txt"), "--truth", str(tmp_path / "t.txt")]) == 0
        for algo in ("mkf", "kf"):
            assert main(["fit", str(tmp_path / "x.txt"), "-K", "2", "-d", "2", "--algo", algo, "--seed", "2",
                         "--truth", str(tmp_path / "t.txt"), "--result", str(tmp_path / f"{algo}.json"),
                         "--labels", str(tmp_path / f"{algo}.labels")]) == 0
        assert main(["bench", "--setting", "d=1,K=2,D=3", "--trials", "2", "--n-per", "50", "--seed", "1",
                     "--kf-restarts", "4", "--json", str(tmp_path / "bench.json"),
                     "--csv", str(tmp_path / "bench.csv")]) == 0
        outputs = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}
        for p in tmp_path.iterdir():
            p.unlink()
        return outputs

    first, second = run(), run()
    differing = [name for name in first if first[name] != second[name]]
    for name in ("mkf.json", "kf.json", "bench.json"):
        json.loads(first[name])
    record(9, not differing and len(first) == 8,
           f"gen, fit (mkf, kf) and bench re-run: {len(first)} outputs compared, differing {differing}")
