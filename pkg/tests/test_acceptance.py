"""Acceptance suite: one PASS/FAIL line per criterion.

Criteria 5, 6, 8 and 9 run the desk-scale problem (m = 4096, d1 = 49,
d2 = 1024, theta = 0.01, lambda = 0.99 / L, 3000 iterations, AM 300).
"""

import filecmp
import math
import time

import numpy as np
import pytest

from blinddeconv import checks, oracle
from blinddeconv.experiment import (ExperimentConfig, generate_problem,
                                    initial_point, run_comparison)
from blinddeconv.prox import bregman_dc_step
from blinddeconv.solvers import SolverConfig, run_bpdca, run_bpdcae


@pytest.fixture(scope="module")
def desk():
    gen = generate_problem(ExperimentConfig())
    z0 = initial_point(gen.problem, ExperimentConfig())
    return gen, z0


@pytest.fixture(scope="module")
def comparison():
    t0 = time.perf_counter()
    summary, results = run_comparison(ExperimentConfig(), write=False)
    return summary, results, time.perf_counter() - t0


def test_c1_dc_identity(report):
    t0 = time.perf_counter()
    worst = checks.check_dc_identity(np.random.default_rng(1), n=100)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 1.0
    report(1, ok, f"max |F - (F1 - F2)| / (1 + |F|) = {worst:.2e} "
                  f"(tol 1e-10), {dt:.2f} s (< 1 s)")
    assert ok


def test_c2_gradient_oracle(report):
    t0 = time.perf_counter()
    worst = checks.check_gradients(np.random.default_rng(2), n=50)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-5 and dt < 10.0
    report(2, ok, f"max relative FD error {worst:.2e} (tol 1e-5), "
                  f"{dt:.2f} s (< 10 s)")
    assert ok


def test_c3_smad_sampling(report):
    t0 = time.perf_counter()
    worst = checks.check_smad(np.random.default_rng(3), n=100)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30.0
    report(3, ok, f"max (<w,F1''w> - L<w,H''w>) / (L||w||^2) = {worst:.3e} "
                  f"(tol 1e-6), {dt:.2f} s (< 30 s)")
    assert ok


def test_c4_cubic_and_closed_form(report):
    t0 = time.perf_counter()
    cubic = checks.check_cubic()
    rng = np.random.default_rng(4)
    worst = 0.0
    for i in range(100):
        inp = checks.random_subproblem(
            rng, theta=[0.0, 0.01, 10.0][i % 3],
            constraint=["free", "nonneg_both"][(i // 3) % 2])
        diff = bregman_dc_step(inp) - oracle.subproblem_oracle(inp)
        worst = max(worst, math.sqrt(diff.norm_sq()))
    dt = time.perf_counter() - t0
    ok = cubic <= 1e-12 and worst <= 1e-6 and dt < 30.0
    report(4, ok, f"cubic residual {cubic:.1e} (tol 1e-12), closed form vs "
                  f"oracle {worst:.1e} (tol 1e-6), {dt:.2f} s (< 30 s)")
    assert ok


def test_c5_bpdca_monotone(desk, report):
    gen, z0 = desk
    t0 = time.perf_counter()
    res = run_bpdca(gen.problem, SolverConfig("bpdca", max_iters=3000), z0)
    dt = time.perf_counter() - t0
    psi = res.psi
    max_inc = float(np.max(np.diff(psi)))
    ok = res.iterations == 3000 and max_inc <= 1e-10 and dt < 120
    report(5, ok, f"max Psi increase {max_inc:.2e} (tol 1e-10) over "
                  f"{res.iterations} iterations, {dt:.1f} s (< 2 min)")
    assert ok


def test_c6_solver_ordering(comparison, report):
    summary, _, dt = comparison
    s = summary["solvers"]
    gaps = {k: v["log10_gap"] for k, v in s.items()}
    cx = {k: v["cossim_x"] for k, v in s.items()}
    base = [k for k in s if k != "bpdcae"]
    best_gap = all(gaps["bpdcae"] <= gaps[k] for k in base)
    cos_ok = cx["bpdcae"] >= 0.95 and all(
        cx["bpdcae"] >= cx[k] - 1e-3 for k in base
        if not math.isnan(cx[k]))
    ok = best_gap and cos_ok and dt < 600
    detail = ", ".join(f"{k} gap {gaps[k]:.3f} cos_x {cx[k]:.4f}"
                       for k in s)
    report(6, ok, f"{detail}; {dt:.1f} s (< 10 min)")
    assert ok


def test_c7_degeneration(desk, report):
    gen, z0 = desk
    p = gen.problem
    ref = run_bpdca(p, SolverConfig("bpdca", max_iters=100, tolerance=0), z0)
    worst = 0.0
    for label, cfg in [("rho=0", SolverConfig("bpdcae", restart_rho=0.0,
                                              max_iters=100, tolerance=0)),
                       ("N=1", SolverConfig("bpdcae", restart_period=1,
                                            max_iters=100, tolerance=0))]:
        res = run_bpdcae(p, cfg, z0)
        assert res.iterations == ref.iterations
        diff = res.z - ref.z
        worst = max(worst, math.sqrt(diff.norm_sq()),
                    float(np.max(np.abs(res.psi - ref.psi))))
    ok = worst <= 1e-12
    report(7, ok, f"max deviation from BPDCA over 100 iterations "
                  f"{worst:.1e} (tol 1e-12)")
    assert ok


def _small_fraction(h):
    hmax = np.max(np.abs(h))
    return float(np.mean(np.abs(h) < 1e-4 * hmax))


def test_c8_l1_vs_l2_sparsity(desk, report):
    gen, z0 = desk
    cfg = SolverConfig("bpdcae", max_iters=3000)
    p1 = gen.problem
    p2 = generate_problem(ExperimentConfig(reg="l2sq_h")).problem
    h1 = run_bpdcae(p1, cfg, z0).z.h
    h2 = run_bpdcae(p2, cfg, z0).z.h
    f1, f2 = _small_fraction(h1), _small_fraction(h2)
    ok = f1 - f2 >= 0.2
    report(8, ok, f"small-entry fraction l1 {f1:.3f} vs l2 {f2:.3f}, "
                  f"difference {f1 - f2:.3f} (need >= 0.2)")
    assert ok


def test_c9_random_init(report):
    wins = 0
    rows = []
    for seed in range(5):
        cfg = ExperimentConfig(init="random", seed=seed)
        summary, _ = run_comparison(cfg, write=False)
        s = summary["solvers"]
        psi = {k: v["psi"] for k, v in s.items()}
        win = all(psi["bpdcae"] <= psi[k] for k in psi if k != "bpdcae")
        wins += win
        rows.append(f"seed {seed}: " + " ".join(
            f"{k}={psi[k]:.4g}" for k in psi))
    ok = wins >= 4
    report(9, ok, f"BPDCAe best in {wins}/5 seeds (need >= 4); "
                  + "; ".join(rows))
    assert ok


def test_c10_infrastructure(report, tmp_path):
    rng = np.random.default_rng(10)
    vals = {
        "adjoint": checks.check_adjoints(rng),
        "convolution": checks.check_convolution(rng),
        "wavelet": checks.check_wavelets(),
        "densify": checks.check_densify(rng),
    }
    cfg = ExperimentConfig(init="random", noise="poisson", seed=3,
                           solvers=[SolverConfig("bpdcae", max_iters=20),
                                    SolverConfig("fista", max_iters=20)])
    run_comparison(cfg, out=tmp_path / "a")
    run_comparison(cfg, out=tmp_path / "b")
    same = all(filecmp.cmp(tmp_path / "a" / f, tmp_path / "b" / f,
                           shallow=False)
               for f in ["bpdcae_trace.csv", "fista_trace.csv"])
    ok = max(vals.values()) <= 1e-10 and same
    report(10, ok, ", ".join(f"{k} {v:.1e}" for k, v in vals.items())
           + f" (tol 1e-10); CSV bytes identical: {same}")
    assert ok
