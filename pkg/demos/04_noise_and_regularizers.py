"""Poisson noise levels and l1 versus squared-l2 regularization of h."""

import numpy as np

from blinddeconv.experiment import (ExperimentConfig, generate_problem,
                                    initial_point)
from blinddeconv.solvers import SolverConfig, run_bpdcae

for scale in [1e4, 1e3, 1e2]:
    gen = generate_problem(ExperimentConfig(noise="poisson", noise_scale=scale))
    print(f"intensity scale {scale:7.0f}: noise std {gen.noise_sigma:.4f}")

for reg in ("l1_h", "l2sq_h"):
    cfg = ExperimentConfig(reg=reg, blur="gaussian")
    gen = generate_problem(cfg)
    z0 = initial_point(gen.problem, cfg)
    res = run_bpdcae(gen.problem, SolverConfig("bpdcae", max_iters=1000), z0,
                     gen.truth)
    h = res.z.h
    small = np.mean(np.abs(h) < 1e-4 * np.abs(h).max()) if h.any() else 1.0
    print(f"{reg:7s} Psi = {res.psi[-1]:.5f}  small entries of h: {small:.2f}")
