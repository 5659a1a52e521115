"""Closed-form solutions of the proximal subproblems.

The Bregman step minimizes, over the constraint set,

    <g, z> + lam * G(z) + H(z),      H(z) = 1/4 ||z||^4 + 1/2 ||z||^2,

where ``g = lam * (grad F1(anchor) - grad F2(z_k)) - grad H(anchor)``. Its
optimality condition ``(||z||^2 + 1) z = -(g + lam * dG)`` reduces the problem
to a separable shrinkage followed by one scalar equation for the common
scale ``t = 1 / (||z||^2 + 1)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import ConstraintSpec, Point, RegularizerSpec

__all__ = [
    "SubproblemInput",
    "soft_threshold",
    "positive_cubic_root",
    "bregman_dc_step",
    "euclidean_prox",
]


def soft_threshold(q, tau):
    """Componentwise ``sign(q) * max(|q| - tau, 0)``."""
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    q = np.asarray(q, dtype=float)
    return np.sign(q) * np.maximum(np.abs(q) - tau, 0.0)


def _cubic_residual(c, t):
    return c * t ** 3 + t - 1.0


def positive_cubic_root(c: float) -> float:
    """Unique positive root of ``c t^3 + t - 1 = 0`` for ``c >= 0``.

    Uses the hyperbolic form of Cardano's formula (the depressed cubic has a
    positive linear coefficient, so there is exactly one real root), one
    Newton polish step, and bisection on ``[0, 1]`` if the residual is still
    above 1e-12.
    """
    c = float(c)
    if not c >= 0 or not math.isfinite(c):
        raise ValueError(f"cubic coefficient must be finite and >= 0, got {c}")
    if c == 0.0:
        return 1.0
    # t^3 + p t + q = 0 with p = 1/c, q = -1/c
    p = 1.0 / c
    arg = -1.5 * math.sqrt(3.0 * c)  # (3q / 2p) * sqrt(3 / p)
    t = -2.0 * math.sqrt(p / 3.0) * math.sinh(math.asinh(arg) / 3.0)
    t -= _cubic_residual(c, t) / (3.0 * c * t * t + 1.0)
    if abs(_cubic_residual(c, t)) <= 1e-12 and 0.0 < t <= 1.0:
        return t
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _cubic_residual(c, mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-17:
            break
    return 0.5 * (lo + hi)


def _l2_scale(a, b, mu):
    """Root ``s >= 1`` of ``s = 1 + a / (s + 2 mu)^2 + b / s^2``."""
    def phi(s):
        return s - 1.0 - a / (s + 2 * mu) ** 2 - b / s ** 2

    lo, hi = 1.0, 1.0 + a + b
    s = hi
    for _ in range(200):
        val = phi(s)
        if val > 0:
            hi = s
        else:
            lo = s
        if abs(val) <= 1e-14 * s:
            break
        slope = 1.0 + 2 * a / (s + 2 * mu) ** 3 + 2 * b / s ** 3
        s_new = s - val / slope
        if not lo < s_new < hi:
            s_new = 0.5 * (lo + hi)
        s = s_new
    return s


@dataclass(frozen=True)
class SubproblemInput:
    """Data of one Bregman proximal subproblem.

    ``g_lin`` is the linear coefficient, ``lambda_theta`` the product of the
    step and the regularization weight.
    """

    g_lin: Point
    lambda_theta: float = 0.0
    constraint: ConstraintSpec = ConstraintSpec("free")
    reg_kind: str = "l1_h"


def bregman_dc_step(inp: SubproblemInput) -> Point:
    """Exact minimizer of ``<g, z> + lam G(z) + H(z)`` over the constraint set."""
    g = inp.g_lin
    if not (np.all(np.isfinite(g.h)) and np.all(np.isfinite(g.x))):
        raise ValueError("non-finite subproblem data")
    mu = float(inp.lambda_theta)
    if mu < 0:
        raise ValueError("lambda_theta must be nonnegative")
    con = inp.constraint

    if inp.reg_kind == "l1_h":
        if con.h_nonneg:
            u = np.minimum(g.h + mu, 0.0)
        else:
            u = soft_threshold(g.h, mu)
        mu_quad = 0.0
    elif inp.reg_kind in ("l2sq_h", "none"):
        u = np.minimum(g.h, 0.0) if con.h_nonneg else g.h.copy()
        mu_quad = mu if inp.reg_kind == "l2sq_h" else 0.0
    else:
        raise ValueError(f"unknown regularizer {inp.reg_kind!r}")
    v = np.minimum(g.x, 0.0) if con.x_nonneg else g.x

    a = float(u @ u)
    b = float(v @ v)
    if mu_quad == 0.0:
        t = positive_cubic_root(a + b)
        # 0 - t*u rather than -t*u so clipped entries are +0.0, not -0.0
        return Point(0.0 - t * u, 0.0 - t * v)
    s = _l2_scale(a, b, mu_quad)
    return Point(0.0 - u / (s + 2 * mu_quad), 0.0 - v / s)


def euclidean_prox(q: Point, step_theta: float, constraint: ConstraintSpec,
                   reg: RegularizerSpec) -> Point:
    """``argmin 1/2 ||z - q||^2 + step_theta * G~(h)`` over the constraint set.

    ``G~`` is the regularizer shape (``||h||_1``, ``||h||^2`` or zero); the
    weight is carried entirely by ``step_theta``.
    """
    if step_theta < 0:
        raise ValueError("step_theta must be nonnegative")
    if reg.kind == "l1_h":
        h = soft_threshold(q.h, step_theta)
    elif reg.kind == "l2sq_h":
        h = q.h / (1.0 + 2.0 * step_theta)
    else:
        h = q.h.copy()
    if constraint.h_nonneg:
        h = np.maximum(h, 0.0)
    x = np.maximum(q.x, 0.0) if constraint.x_nonneg else q.x.copy()
    return Point(h, x)
