"""Slow brute-force references used to validate the fast code paths.

Everything here works on explicit matrices or plain coordinate loops and is
only meant for small instances (tests and the ``check`` command).
"""

import numpy as np

from .model import Point

__all__ = [
    "OracleError",
    "DenseOracle",
    "densify",
    "fd_gradient",
    "subproblem_oracle",
]

DENSIFY_CAP = 1_000_000


class OracleError(RuntimeError):
    pass


def densify(op) -> np.ndarray:
    """Explicit matrix of ``op``; column ``j`` is ``op.apply(e_j)``."""
    size = op.output_dim * op.input_dim
    if size > DENSIFY_CAP:
        raise OracleError(f"densify: {op.output_dim}x{op.input_dim} exceeds "
                          f"the cap of {DENSIFY_CAP} entries")
    cols = [op.apply(e) for e in np.eye(op.input_dim)]
    return np.array(cols, dtype=complex).T.reshape(op.output_dim,
                                                   op.input_dim)


class DenseOracle:
    """Dense replica of a problem: explicit ``B``, ``A`` and ``y``.

    Values are evaluated from the matrices with no shared code
    beyond :class:`Point`.
    """

    def __init__(self, problem):
        if problem.m > 64:
            raise OracleError("dense oracle is limited to m <= 64")
        self.B = densify(problem.op_b)
        self.A = densify(problem.op_a)
        self.y = problem.y.copy()

    def loss(self, z: Point):
        p = self.B @ z.h
        q = self.A @ z.x
        return 0.5 * float(np.sum(np.abs(p * np.conj(q) - self.y) ** 2))

    def f1(self, z: Point):
        p2 = np.abs(self.B @ z.h) ** 2
        q2 = np.abs(self.A @ z.x) ** 2
        y2 = np.abs(self.y) ** 2
        return float(0.25 * np.sum((p2 + q2) ** 2)
                     + 0.5 * (np.sum(y2 * p2) + np.sum(q2) + np.sum(y2)))

    def f2(self, z: Point):
        p = self.B @ z.h
        q = self.A @ z.x
        r = np.conj(self.y) * p + q
        return float(0.25 * np.sum(np.abs(p) ** 4)
                     + 0.25 * np.sum(np.abs(q) ** 4)
                     + 0.5 * np.sum(np.abs(r) ** 2))

    def smad_constant(self):
        b2 = np.sum(np.abs(self.B) ** 2, axis=1)
        a2 = np.sum(np.abs(self.A) ** 2, axis=1)
        y2 = np.abs(self.y) ** 2
        return float(np.sum(3 * b2 ** 2 + 3 * a2 ** 2 + b2 * a2 + y2 * b2
                            + a2))


def fd_gradient(fun, z: Point, step=1e-5) -> Point:
    """Central-difference gradient of a scalar function of a :class:`Point`."""
    if not step > 0:
        raise ValueError("step must be positive")
    vec = z.vector()
    d1 = z.h.size
    grad = np.empty_like(vec)
    for i in range(vec.size):
        e = np.zeros_like(vec)
        e[i] = step
        grad[i] = (fun(Point.from_vector(vec + e, d1))
                   - fun(Point.from_vector(vec - e, d1))) / (2 * step)
    return Point.from_vector(grad, d1)


def _smooth_grad(inp, z):
    g = inp.g_lin + (z.norm_sq() + 1.0) * z
    if inp.reg_kind == "l2sq_h":
        g = Point(g.h + 2 * inp.lambda_theta * z.h, g.x)
    return g


def _prox(inp, z, step):
    h = z.h
    if inp.reg_kind == "l1_h":
        tau = step * inp.lambda_theta
        h = np.sign(h) * np.maximum(np.abs(h) - tau, 0.0)
    x = z.x
    if inp.constraint.h_nonneg:
        h = np.maximum(h, 0.0)
    if inp.constraint.x_nonneg:
        x = np.maximum(x, 0.0)
    return Point(h, x)


def _free_bisection(inp):
    """Free-case solution through bisection on the common scale ``t``."""
    mu = inp.lambda_theta
    gh = inp.g_lin.h
    u = np.sign(gh) * np.maximum(np.abs(gh) - mu, 0.0) \
        if inp.reg_kind == "l1_h" else gh
    c = float(u @ u + inp.g_lin.x @ inp.g_lin.x)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if c * mid ** 3 + mid - 1.0 > 0:
            hi = mid
        else:
            lo = mid
    t = 0.5 * (lo + hi)
    return Point(-t * u, -t * inp.g_lin.x)


def subproblem_oracle(inp, tol=1e-8, max_steps=100_000) -> Point:
    """Proximal-gradient minimizer of ``<g, z> + G + H`` over the constraint set.

    A fixed step from a curvature bound on a ball known to contain the
    iterates is used. Stops once the prox-gradient mapping certifies a
    distance to the minimizer of at most ``tol`` (the objective is 1-strongly
    convex).
    In the free ``l1_h``/``none`` case the result is cross-checked against a
    bisection solve of the scalar equation for the common scale.
    """
    d = inp.g_lin.h.size + inp.g_lin.x.size
    if d > 10:
        raise OracleError("subproblem oracle is limited to dimension <= 10")

    # The minimizer satisfies (||z||^2 + 1) ||z|| <= ||g||, so it lies in a
    # ball of radius r. Iterates started at 0 stay within 2 r of the origin
    # (prox-gradient steps are Fejer monotone), where the Hessian of the
    # smooth part is bounded by 3 (2 r)^2 + 1 + 2 mu.
    gnorm = np.sqrt(inp.g_lin.norm_sq())
    r = min(gnorm, gnorm ** (1.0 / 3.0))
    lip = 3.0 * (2.0 * r) ** 2 + 1.0
    if inp.reg_kind == "l2sq_h":
        lip += 2.0 * inp.lambda_theta
    step = 1.0 / lip

    z = Point.zeros(inp.g_lin.h.size, inp.g_lin.x.size)
    for _ in range(max_steps):
        z_new = _prox(inp, z - step * _smooth_grad(inp, z), step)
        # distance to the minimizer is at most 2 ||z_new - z|| / step
        # (1-strong convexity, step <= 1 / lip)
        done = 2.0 * np.sqrt((z_new - z).norm_sq()) / step <= tol
        z = z_new
        if done:
            break
    else:
        raise OracleError(f"subproblem oracle: no convergence in "
                          f"{max_steps} steps")

    if inp.constraint.kind == "free" and inp.reg_kind in ("l1_h", "none"):
        ref = _free_bisection(inp)
        if np.sqrt((ref - z).norm_sq()) > 1e-6 * (1 + np.sqrt(ref.norm_sq())):
            raise OracleError("projected-gradient and bisection solutions "
                              "disagree")
    return z
