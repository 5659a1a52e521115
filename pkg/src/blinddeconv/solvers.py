"""Iterative solvers for the regularized blind-deconvolution problem.

* :func:`run_bpdca`  -- Bregman proximal DC algorithm with the quartic kernel.
* :func:`run_bpdcae` -- the same with extrapolation and adaptive restart.
* :func:`run_fista`  -- FISTA with backtracking on the full loss.
* :func:`run_am`     -- alternating minimization, each block solved
  approximately by a few FISTA steps.

All solvers share :class:`SolverConfig`, record one :class:`IterationRecord`
per iteration and return a :class:`RunResult`.
"""

import math
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .bregman import bregman_distance, kernel_grad
from .model import DeconvProblem, Point
from .prox import SubproblemInput, bregman_dc_step, euclidean_prox

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "RunResult",
    "SolverError",
    "spectral_init",
    "random_init",
    "stationarity_residual",
    "run_bpdca",
    "run_bpdcae",
    "run_fista",
    "run_am",
    "run_solver",
    "cosine_similarity",
]

ALGORITHMS = ("bpdca", "bpdcae", "fista", "am")


@dataclass
class SolverConfig:
    """Algorithm choice and parameters.

    Attributes
    ----------
    algorithm : str
        One of ``bpdca``, ``bpdcae``, ``fista``, ``am``.
    lam : float or None
        Step size of the Bregman methods; ``None`` means ``0.99 / L``. Must
        satisfy ``0 < lam * L < 1``.
    restart_rho, restart_period : float, int
        Restart safeguard and scheduled restart period of BPDCAe.
    max_iters : int
        Iteration budget. For AM one outer iteration counts once.
    inner_fista_iters : int
        FISTA steps per block in each AM iteration.
    backtrack_eta, lipschitz0 : float
        Backtracking factor (> 1) and initial Lipschitz guess of FISTA/AM.
    tolerance : float or None
        Stop once the stationarity residual is at or below this value.
        ``None`` means ``1e-9 * (1 + Psi(z0))``; ``0`` disables the test.
    """

    algorithm: str = "bpdcae"
    lam: Optional[float] = None
    restart_rho: float = 0.99
    restart_period: int = 200
    max_iters: int = 3000
    inner_fista_iters: int = 10
    backtrack_eta: float = 2.0
    lipschitz0: float = 1.0
    tolerance: Optional[float] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not 0 <= self.restart_rho < 1:
            raise ValueError("restart_rho must lie in [0, 1)")
        if self.restart_period < 1:
            raise ValueError("restart_period must be a positive integer")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.backtrack_eta <= 1:
            raise ValueError("backtrack_eta must exceed 1")
        if self.lipschitz0 <= 0:
            raise ValueError("lipschitz0 must be positive")

    def step_size(self, problem: DeconvProblem):
        lam = 0.99 / problem.L if self.lam is None else float(self.lam)
        if not 0 < lam * problem.L < 1:
            raise ValueError(
                f"step size lam={lam:g} violates 0 < lam * L < 1 "
                f"(L = {problem.L:g})")
        return lam


@dataclass
class IterationRecord:
    k: int
    psi: float
    loss: float
    cossim_h: float = math.nan
    cossim_x: float = math.nan
    restart: bool = False
    step: float = math.nan
    seconds: float = 0.0


@dataclass
class RunResult:
    algorithm: str
    z: Point
    trace: List[IterationRecord] = field(default_factory=list)
    reason: str = ""

    @property
    def iterations(self):
        return len(self.trace) - 1

    @property
    def psi(self):
        return np.array([rec.psi for rec in self.trace])


class SolverError(RuntimeError):
    """A run had to be aborted; ``result`` holds the partial run."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


def cosine_similarity(a, b) -> float:
    """``<a, b> / (||a|| ||b||)``; raises on a zero vector."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def _safe_cossim(a, b):
    try:
        return cosine_similarity(a, b)
    except ValueError:
        return math.nan


class _Tracer:
    def __init__(self, problem, algorithm, truth):
        self.problem = problem
        self.truth = truth
        self.result = RunResult(algorithm, None)
        self.t0 = time.perf_counter()

    def record(self, k, z, bh, ax, restart=False, step=math.nan):
        loss = self.problem.loss_from(bh, ax)
        psi = loss + self.problem.reg.value(z.h)
        rec = IterationRecord(k, psi, loss, restart=restart, step=step,
                              seconds=time.perf_counter() - self.t0)
        if self.truth is not None:
            rec.cossim_h = _safe_cossim(z.h, self.truth.h)
            rec.cossim_x = _safe_cossim(z.x, self.truth.x)
        self.result.trace.append(rec)
        self.result.z = z
        if not math.isfinite(psi):
            self.result.reason = f"aborted: non-finite objective at k={k}"
            raise SolverError(self.result.reason, self.result)
        return psi

    def finish(self, reason):
        self.result.reason = reason
        return self.result


def _tolerance(cfg, problem, z0):
    if cfg.tolerance is None:
        bh, ax = problem.forward(z0)
        psi0 = problem.loss_from(bh, ax) + problem.reg.value(z0.h)
        return 1e-9 * (1.0 + abs(psi0))
    return float(cfg.tolerance)


def _stationarity_from_grad(problem: DeconvProblem, z: Point, g: Point):
    reg = problem.reg
    con = problem.constraint
    h = z.h
    gh = g.h.copy()
    if reg.kind == "l2sq_h":
        gh = gh + 2.0 * reg.theta * h
    if reg.kind == "l1_h":
        theta = reg.theta
        if con.h_nonneg:
            # subdifferential of theta*h + indicator(h >= 0) at 0 is (-inf, theta]
            rh = np.where(h > 0, gh + theta, np.minimum(gh + theta, 0.0))
        else:
            rh = np.where(h != 0, gh + theta * np.sign(h),
                          np.maximum(np.abs(gh) - theta, 0.0))
    else:
        rh = np.where(h > 0, gh, np.minimum(gh, 0.0)) if con.h_nonneg else gh
    gx = g.x
    rx = np.where(z.x > 0, gx, np.minimum(gx, 0.0)) if con.x_nonneg else gx
    return float(np.sqrt(rh @ rh + rx @ rx))


def stationarity_residual(problem: DeconvProblem, z: Point) -> float:
    """Distance from zero to ``grad F(z) + dG(z) + N_C(z)``.

    The minimum-norm element is found coordinate by coordinate.
    """
    bh, ax = problem.forward(z)
    g = problem.to_point(*problem.grad_f_residuals(bh, ax))
    return _stationarity_from_grad(problem, z, g)


def spectral_init(problem: DeconvProblem, tol=1e-8, max_iters=200, seed=0):
    """Leading singular pair of ``Re(B^H diag(y) conj(A))``.

    Power iteration on ``M^T M`` using operator applies only. The pair is
    returned with unit norms, signed so that its entries sum to a
    nonnegative value.
    """
    if not np.any(problem.y):
        raise ValueError("spectral initialization needs nonzero measurements")
    op_b, op_a, y = problem.op_b, problem.op_a, problem.y

    def mat(v):
        return op_b.adjoint_apply(y * np.conj(op_a.apply(v)))

    def mat_t(u):
        return op_a.adjoint_apply(y * np.conj(op_b.apply(u)))

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(problem.d2)
    v /= np.linalg.norm(v)
    converged = False
    for _ in range(max_iters):
        u = mat(v)
        nu = np.linalg.norm(u)
        if nu == 0:
            raise ValueError("measurement operator has no leading direction")
        v_new = mat_t(u / nu)
        nv = np.linalg.norm(v_new)
        if nv == 0:
            raise ValueError("measurement operator has no leading direction")
        v_new /= nv
        if v_new @ v < 0:
            v_new = -v_new
        delta = np.linalg.norm(v_new - v)
        v = v_new
        if delta <= tol:
            converged = True
            break
    if not converged:
        warnings.warn("spectral initialization: power iteration did not "
                      f"converge in {max_iters} iterations", RuntimeWarning)
    u = mat(v)
    sigma = np.linalg.norm(u)
    u = u / sigma
    total = u.sum() + v.sum()
    if total < 0:
        u, v = -u, -v
    return Point(u, v)


def random_init(d1, d2, seed=0, high=0.1):
    """Entries drawn uniformly from ``[0, high]``."""
    rng = np.random.default_rng(seed)
    return Point(rng.uniform(0.0, high, d1), rng.uniform(0.0, high, d2))


def _dc_step(problem, lam, g_lin):
    reg = problem.reg
    inp = SubproblemInput(g_lin, lam * reg.theta if reg.kind != "none" else 0.0,
                          problem.constraint, reg.kind)
    return bregman_dc_step(inp)


def run_bpdca(problem: DeconvProblem, cfg: SolverConfig, z0: Point,
              truth: Optional[Point] = None) -> RunResult:
    """Bregman proximal DC algorithm.

    Each step minimizes ``<grad F1(z) - grad F2(z), .> + G + D_H(., z) / lam``
    in closed form.
    """
    lam = cfg.step_size(problem)
    tol = _tolerance(cfg, problem, z0)
    tracer = _Tracer(problem, "bpdca", truth)
    z = z0.copy()
    bh, ax = problem.forward(z)
    tracer.record(0, z, bh, ax)
    for k in range(cfg.max_iters):
        g = problem.to_point(*problem.grad_f_residuals(bh, ax))
        if tol > 0 and _stationarity_from_grad(problem, z, g) <= tol:
            return tracer.finish("stationary")
        z = _dc_step(problem, lam, lam * g - kernel_grad(z))
        bh, ax = problem.forward(z)
        tracer.record(k + 1, z, bh, ax)
    return tracer.finish("max_iters")


def run_bpdcae(problem: DeconvProblem, cfg: SolverConfig, z0: Point,
               truth: Optional[Point] = None) -> RunResult:
    """Bregman proximal DC algorithm with extrapolation.

    The extrapolated point ``w = z + (t_prev - 1) / t (z - z_prev)`` is
    discarded (momentum restart) every ``restart_period`` iterations, when it
    leaves the constraint set, or when ``D_H(z, w)`` exceeds
    ``restart_rho * D_H(z_prev, z)``. The step linearizes ``F1`` at ``w`` and
    ``F2`` at ``z``.
    """
    lam = cfg.step_size(problem)
    tol = _tolerance(cfg, problem, z0)
    rho = cfg.restart_rho
    tracer = _Tracer(problem, "bpdcae", truth)
    con = problem.constraint

    z = z0.copy()
    bh, ax = problem.forward(z)
    z_prev, bh_prev, ax_prev = z, bh, ax
    t_prev = t = 1.0
    d_prev = 0.0  # D_H(z_prev, z)
    tracer.record(0, z, bh, ax)
    for k in range(cfg.max_iters):
        beta = (t_prev - 1.0) / t
        w = z + beta * (z - z_prev)
        restart = (k % cfg.restart_period == 0
                   or not con.contains(w)
                   or bregman_distance(z, w) > rho * d_prev)
        if restart:
            t_prev = t = 1.0
            beta = 0.0
            w = z
        t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0

        g = problem.to_point(*problem.grad_f_residuals(bh, ax))
        if tol > 0 and _stationarity_from_grad(problem, z, g) <= tol:
            return tracer.finish("stationary")
        if beta == 0.0:
            g_step = g
        else:
            # operators are linear: B w and A w follow from cached products
            bw = bh + beta * (bh - bh_prev)
            aw = ax + beta * (ax - ax_prev)
            r1b, r1a = problem.grad_f1_residuals(bw, aw)
            r2b, r2a = problem.grad_f2_residuals(bh, ax)
            g_step = problem.to_point(r1b - r2b, r1a - r2a)
        z_new = _dc_step(problem, lam, lam * g_step - kernel_grad(w))

        d_prev = bregman_distance(z, z_new)
        z_prev, bh_prev, ax_prev = z, bh, ax
        z = z_new
        bh, ax = problem.forward(z)
        t_prev, t = t, t_next
        tracer.record(k + 1, z, bh, ax, restart=restart)
    return tracer.finish("max_iters")


class _BlockFista:
    """FISTA with backtracking on a subset of the blocks of ``z``.

    ``blocks`` is ``"hx"`` (joint), ``"h"`` or ``"x"``; the other block is
    held fixed.
    """

    def __init__(self, problem, cfg, blocks="hx"):
        self.problem = problem
        self.eta = cfg.backtrack_eta
        self.lipschitz = cfg.lipschitz0
        self.blocks = blocks

    def _mask(self, p: Point):
        h = p.h if "h" in self.blocks else np.zeros_like(p.h)
        x = p.x if "x" in self.blocks else np.zeros_like(p.x)
        return Point(h, x)

    def _prox(self, q: Point, step, fixed: Point):
        problem = self.problem
        out = euclidean_prox(q, step * problem.reg.theta, problem.constraint,
                             problem.reg)
        h = out.h if "h" in self.blocks else fixed.h
        x = out.x if "x" in self.blocks else fixed.x
        return Point(h, x)

    def step(self, yk: Point, by, ay, fixed: Point):
        """One backtracking prox-gradient step from ``yk``.

        Returns the new point with its products and the step used.
        """
        problem = self.problem
        f_y = problem.loss_from(by, ay)
        g = self._mask(problem.to_point(*problem.grad_f_residuals(by, ay)))
        for _ in range(61):
            step = 1.0 / self.lipschitz
            z_new = self._prox(yk - step * g, step, fixed)
            bz, az = problem.forward(z_new)
            diff = z_new - yk
            bound = f_y + g.dot(diff) + 0.5 * self.lipschitz * diff.norm_sq()
            f_new = problem.loss_from(bz, az)
            if f_new <= bound + 1e-12 * abs(f_y):
                return z_new, bz, az, step
            self.lipschitz *= self.eta
        raise SolverError("backtracking exceeded 60 increases of the "
                          "Lipschitz estimate")

    def run(self, z: Point, bz, az, iters):
        """``iters`` accelerated steps from ``z`` (momentum starts fresh)."""
        z_prev, bz_prev, az_prev = z, bz, az
        t = 1.0
        yk, by, ay = z, bz, az
        step = math.nan
        for _ in range(iters):
            z_new, bz_new, az_new, step = self.step(yk, by, ay, z)
            t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
            beta = (t - 1.0) / t_new
            z_prev, bz_prev, az_prev = z, bz, az
            z, bz, az = z_new, bz_new, az_new
            yk = z + beta * (z - z_prev)
            by = bz + beta * (bz - bz_prev)
            ay = az + beta * (az - az_prev)
            t = t_new
        return z, bz, az, step


def run_fista(problem: DeconvProblem, cfg: SolverConfig, z0: Point,
              truth: Optional[Point] = None) -> RunResult:
    """FISTA on ``F + G`` over the constraint set, Euclidean prox, backtracking.

    The Lipschitz estimate starts at ``lipschitz0`` and is multiplied by
    ``backtrack_eta`` until the quadratic upper bound holds at the trial
    point; it is never decreased.
    """
    tol = _tolerance(cfg, problem, z0)
    tracer = _Tracer(problem, "fista", truth)
    fista = _BlockFista(problem, cfg)
    z = z0.copy()
    bz, az = problem.forward(z)
    tracer.record(0, z, bz, az)
    z_prev, bz_prev, az_prev = z, bz, az
    t = 1.0
    yk, by, ay = z, bz, az
    for k in range(cfg.max_iters):
        if tol > 0:
            g = problem.to_point(*problem.grad_f_residuals(bz, az))
            if _stationarity_from_grad(problem, z, g) <= tol:
                return tracer.finish("stationary")
        try:
            z_new, bz_new, az_new, step = fista.step(yk, by, ay, z)
        except SolverError as exc:
            tracer.result.reason = f"aborted: {exc}"
            raise SolverError(str(exc), tracer.result) from None
        t_new = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        beta = (t - 1.0) / t_new
        z_prev, bz_prev, az_prev = z, bz, az
        z, bz, az = z_new, bz_new, az_new
        yk = z + beta * (z - z_prev)
        by = bz + beta * (bz - bz_prev)
        ay = az + beta * (az - az_prev)
        t = t_new
        tracer.record(k + 1, z, bz, az, step=step)
    return tracer.finish("max_iters")


def run_am(problem: DeconvProblem, cfg: SolverConfig, z0: Point,
           truth: Optional[Point] = None) -> RunResult:
    """Alternating minimization over ``h`` and ``x``.

    Each outer iteration runs ``inner_fista_iters`` FISTA steps on ``h`` with
    ``x`` fixed, then the same on ``x`` with the new ``h``. Both block
    problems are convex. Lipschitz estimates persist across outer iterations.
    """
    tol = _tolerance(cfg, problem, z0)
    tracer = _Tracer(problem, "am", truth)
    solver_h = _BlockFista(problem, cfg, "h")
    solver_x = _BlockFista(problem, cfg, "x")
    z = z0.copy()
    bz, az = problem.forward(z)
    tracer.record(0, z, bz, az)
    for k in range(cfg.max_iters):
        if tol > 0:
            g = problem.to_point(*problem.grad_f_residuals(bz, az))
            if _stationarity_from_grad(problem, z, g) <= tol:
                return tracer.finish("stationary")
        try:
            z, bz, az, _ = solver_h.run(z, bz, az, cfg.inner_fista_iters)
            z, bz, az, step = solver_x.run(z, bz, az, cfg.inner_fista_iters)
        except SolverError as exc:
            tracer.result.reason = f"aborted: {exc}"
            raise SolverError(str(exc), tracer.result) from None
        tracer.record(k + 1, z, bz, az, step=step)
    return tracer.finish("max_iters")


_RUNNERS = {
    "bpdca": run_bpdca,
    "bpdcae": run_bpdcae,
    "fista": run_fista,
    "am": run_am,
}


def run_solver(problem: DeconvProblem, cfg: SolverConfig, z0: Point,
               truth: Optional[Point] = None) -> RunResult:
    """Dispatch on ``cfg.algorithm``."""
    return _RUNNERS[cfg.algorithm](problem, cfg, z0, truth)


def with_algorithm(cfg: SolverConfig, algorithm: str) -> SolverConfig:
    return replace(cfg, algorithm=algorithm)
