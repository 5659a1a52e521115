"""Invariant suite run by ``blinddeconv check``.

Each check draws small random instances, compares the fast code paths with
the references in :mod:`blinddeconv.oracle` and reports the worst deviation.
"""

import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import oracle, wavelets
from .bregman import hessian_apply, kernel_grad, kernel_value
from .model import (ConstraintSpec, DeconvProblem, Point, RegularizerSpec,
                    f1_value, f2_value, grad_f1, grad_f2, loss_f)
from .operators import (DenseOperator, EmbeddingSpec, FourierEmbedding,
                        FourierSynthesis, WaveletSpec, circular_convolve)
from .prox import SubproblemInput, bregman_dc_step, positive_cubic_root

__all__ = ["CheckResult", "random_problem", "run_checks", "CHECKS"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    seconds: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: worst {self.worst:.3e} "
                f"(tol {self.tolerance:.0e}, {self.seconds:.2f} s)")


def random_problem(rng, kind=None, theta=0.01) -> DeconvProblem:
    """Small instance with ``m <= 64``.

    ``kind`` is ``"dense"`` (random complex matrices), ``"fourier_1d"``,
    ``"fourier_2d"`` or ``None`` (pick one at random).
    """
    if kind is None:
        kind = rng.choice(["dense", "fourier_1d", "fourier_2d"])
    if kind == "dense":
        m = int(rng.integers(2, 17))
        d1 = int(rng.integers(1, 5))
        d2 = int(rng.integers(1, 5))
        op_b = DenseOperator((rng.standard_normal((m, d1))
                              + 1j * rng.standard_normal((m, d1))) / np.sqrt(m))
        op_a = DenseOperator((rng.standard_normal((m, d2))
                              + 1j * rng.standard_normal((m, d2))) / np.sqrt(m))
    elif kind == "fourier_1d":
        m = 16
        op_b = FourierEmbedding(EmbeddingSpec((m,), (int(rng.integers(1, 5)),)))
        op_a = FourierSynthesis((m,), WaveletSpec(2, "haar", 2))
    elif kind == "fourier_2d":
        shape = (8, 8)
        k = int(rng.integers(1, 4))
        op_b = FourierEmbedding(EmbeddingSpec(shape, (k, k)))
        family = str(rng.choice(["haar", "meyer_approx"]))
        op_a = FourierSynthesis(shape, WaveletSpec(1, family, 1))
    else:
        raise ValueError(f"unknown problem kind {kind!r}")
    y = rng.standard_normal(op_b.output_dim) \
        + 1j * rng.standard_normal(op_b.output_dim)
    return DeconvProblem(op_b, op_a, y, RegularizerSpec("l1_h", theta),
                         ConstraintSpec("free"))


def _random_point(rng, problem, scale=1.0):
    return Point(scale * rng.standard_normal(problem.d1),
                 scale * rng.standard_normal(problem.d2))


def check_dc_identity(rng, n=100):
    worst = 0.0
    for _ in range(n):
        p = random_problem(rng)
        z = _random_point(rng, p, 10 ** rng.uniform(-1, 1))
        f = loss_f(p, z)
        worst = max(worst, abs(f - (f1_value(p, z) - f2_value(p, z)))
                    / (1 + abs(f)))
    return worst


def check_gradients(rng, n=50):
    worst = 0.0
    for _ in range(n):
        p = random_problem(rng)
        z = _random_point(rng, p)
        for fun, grad in [(lambda u: f1_value(p, u), grad_f1(p, z)),
                          (lambda u: f2_value(p, u), grad_f2(p, z)),
                          (kernel_value, kernel_grad(z))]:
            ref = oracle.fd_gradient(fun, z, 1e-5)
            err = np.sqrt((ref - grad).norm_sq())
            worst = max(worst, err / max(1.0, np.sqrt(ref.norm_sq())))
    return worst


def smad_violation(p, z, w, eps=1e-5):
    """``<w, hess F1 w> - L <w, hess H w>`` scaled by ``L ||w||^2``.

    The ``F1`` curvature comes from central differences of its gradient.
    """
    gp = grad_f1(p, z + eps * w)
    gm = grad_f1(p, z - eps * w)
    curv_f1 = (gp - gm).dot(w) / (2 * eps)
    curv_h = hessian_apply(z, w).dot(w)
    return (curv_f1 - p.L * curv_h) / (p.L * w.norm_sq())


def check_smad(rng, n=100):
    worst = -np.inf
    for _ in range(n):
        p = random_problem(rng)
        z = _random_point(rng, p, 10 ** rng.uniform(-1, 1))
        w = _random_point(rng, p)
        worst = max(worst, smad_violation(p, z, w))
    return worst


def check_cubic(rng=None):
    worst = 0.0
    for c in [1e-6, 1e-3, 1.0, 1e3, 1e6, 1e9]:
        t = positive_cubic_root(c)
        worst = max(worst, abs(c * t ** 3 + t - 1.0))
    return worst


def random_subproblem(rng, theta=None, constraint=None, reg_kind="l1_h"):
    d1 = int(rng.integers(1, 5))
    d2 = int(rng.integers(1, 6))
    scale = 10 ** rng.uniform(-2, 2)
    g = Point(scale * rng.standard_normal(d1), scale * rng.standard_normal(d2))
    if theta is None:
        theta = float(rng.choice([0.0, 0.01, 10.0]))
    if constraint is None:
        constraint = str(rng.choice(["free", "nonneg_both", "nonneg_h"]))
    return SubproblemInput(g, theta, ConstraintSpec(constraint), reg_kind)


def check_subproblem(rng, n=100):
    worst = 0.0
    for i in range(n):
        inp = random_subproblem(rng, theta=[0.0, 0.01, 10.0][i % 3],
                                constraint=["free", "nonneg_both"][i % 2])
        a = bregman_dc_step(inp)
        b = oracle.subproblem_oracle(inp)
        worst = max(worst, np.sqrt((a - b).norm_sq()))
    return worst


def check_adjoints(rng, n=20):
    worst = 0.0
    for _ in range(n):
        p = random_problem(rng)
        for op in (p.op_b, p.op_a):
            v = rng.standard_normal(op.input_dim)
            w = rng.standard_normal(op.output_dim) \
                + 1j * rng.standard_normal(op.output_dim)
            lhs = np.real(np.vdot(w, op.apply(v)))
            rhs = float(v @ op.adjoint_apply(w))
            worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    return worst


def check_convolution(rng, n=20):
    """``F(f * g) = sqrt(m) F f . F g`` against a direct circular sum."""
    worst = 0.0
    for _ in range(n):
        m = int(rng.integers(2, 33))
        f = rng.standard_normal(m)
        g = rng.standard_normal(m)
        direct = np.array([sum(f[j] * g[(i - j) % m] for j in range(m))
                           for i in range(m)])
        worst = max(worst, np.max(np.abs(circular_convolve(f, g) - direct)))
    return worst


def check_wavelets(rng=None):
    worst = 0.0
    for family in ("haar", "meyer_approx"):
        for shape, levels in [((32,), 3), ((16, 16), 2)]:
            spec = WaveletSpec(levels, family)
            m = int(np.prod(shape))
            basis = np.eye(m).reshape((m,) + shape)
            w = wavelets.forward(basis, spec, len(shape)).reshape(m, m)
            worst = max(worst, np.max(np.abs(w @ w.T - np.eye(m))))
    return worst


def check_densify(rng, n=10):
    worst = 0.0
    for _ in range(n):
        p = random_problem(rng)
        for op in (p.op_b, p.op_a):
            mat = oracle.densify(op)
            for _ in range(20):
                v = rng.standard_normal(op.input_dim)
                worst = max(worst, np.max(np.abs(mat @ v - op.apply(v))))
    return worst


CHECKS: List = [
    ("dc_identity", check_dc_identity, 1e-10),
    ("gradients_vs_finite_differences", check_gradients, 1e-5),
    ("smad_curvature", check_smad, 1e-6),
    ("cubic_residual", check_cubic, 1e-12),
    ("subproblem_vs_oracle", check_subproblem, 1e-6),
    ("adjoints", check_adjoints, 1e-10),
    ("convolution_theorem", check_convolution, 1e-10),
    ("wavelet_orthogonality", check_wavelets, 1e-10),
    ("densify_consistency", check_densify, 1e-10),
]


def run_checks(seed=0, names=None) -> List[CheckResult]:
    results = []
    for name, fun, tol in CHECKS:
        if names and name not in names:
            continue
        rng = np.random.default_rng(seed)
        t0 = time.perf_counter()
        worst = float(fun(rng))
        results.append(CheckResult(name, worst <= tol, worst, tol,
                                   time.perf_counter() - t0))
    return results
