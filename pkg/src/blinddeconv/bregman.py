"""Quartic kernel generating distance and its Bregman geometry.

    H(z) = 1/4 ||z||^4 + 1/2 ||z||^2,   grad H(z) = (||z||^2 + 1) z

The Hessian ``(||z||^2 + 1) I + 2 z z^T`` has the closed-form inverse used by
:func:`hessian_inverse_apply`.
"""

from .model import Point

__all__ = [
    "kernel_value",
    "kernel_grad",
    "bregman_distance",
    "hessian_apply",
    "hessian_inverse_apply",
    "euclidean_kernel_value",
]


def kernel_value(z: Point) -> float:
    s = z.norm_sq()
    return 0.25 * s * s + 0.5 * s


def kernel_grad(z: Point) -> Point:
    return (z.norm_sq() + 1.0) * z


def bregman_distance(z: Point, w: Point) -> float:
    """``D_H(z, w) = H(z) - H(w) - <grad H(w), z - w>``."""
    return kernel_value(z) - kernel_value(w) - kernel_grad(w).dot(z - w)


def hessian_apply(z: Point, w: Point) -> Point:
    """Forward Hessian action ``(||z||^2 + 1) w + 2 <z, w> z``."""
    return (z.norm_sq() + 1.0) * w + (2.0 * z.dot(w)) * z


def hessian_inverse_apply(z: Point, w: Point) -> Point:
    """Solve ``hess H(z) v = w`` without forming a matrix.

    ``v = (w - 2 <z, w> z / (3 ||z||^2 + 1)) / (||z||^2 + 1)``
    """
    s = z.norm_sq()
    return (1.0 / (s + 1.0)) * (w - (2.0 * z.dot(w) / (3.0 * s + 1.0)) * z)


def euclidean_kernel_value(z: Point) -> float:
    """``1/2 ||z||^2``, the kernel behind plain (F)ISTA steps."""
    return 0.5 * z.norm_sq()
