"""The blind-deconvolution objective and its difference-of-convex split.

For a point ``z = (h, x)`` write ``p = Bh`` and ``q = Ax``. The loss is

    F(z) = 1/2 ||p * conj(q) - y||^2

and it splits as ``F = F1 - F2`` with the convex parts

    F1(z) = 1/4 sum (|p|^2 + |q|^2)^2 + 1/2 (||y * p||^2 + ||q||^2 + ||y||^2)
    F2(z) = 1/4 ||p||_4^4 + 1/4 ||q||_4^4 + 1/2 ||conj(y) * p + q||^2

All products are elementwise. The regularizer G acts on ``h`` only and the
constraint set is the nonnegative orthant (or all of space).
"""

from dataclasses import dataclass

import numpy as np

from .operators import ShapeError, StructuredOperator

__all__ = [
    "Point",
    "RegularizerSpec",
    "ConstraintSpec",
    "DeconvProblem",
    "loss_f",
    "f1_value",
    "f2_value",
    "grad_f1",
    "grad_f2",
    "grad_f",
    "reg_value",
    "objective_psi",
    "smad_bound",
]


@dataclass(frozen=True)
class Point:
    """A pair ``z = (h, x)`` of real vectors."""

    h: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float).reshape(-1))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(-1))

    @classmethod
    def zeros(cls, d1, d2):
        return cls(np.zeros(d1), np.zeros(d2))

    @classmethod
    def from_vector(cls, vec, d1):
        vec = np.asarray(vec, dtype=float)
        return cls(vec[:d1], vec[d1:])

    def vector(self):
        return np.concatenate([self.h, self.x])

    def norm_sq(self):
        return float(self.h @ self.h + self.x @ self.x)

    def dot(self, other):
        return float(self.h @ other.h + self.x @ other.x)

    def copy(self):
        return Point(self.h.copy(), self.x.copy())

    def __add__(self, other):
        return Point(self.h + other.h, self.x + other.x)

    def __sub__(self, other):
        return Point(self.h - other.h, self.x - other.x)

    def __mul__(self, scalar):
        return Point(scalar * self.h, scalar * self.x)

    __rmul__ = __mul__

    def __neg__(self):
        return Point(-self.h, -self.x)


REG_KINDS = ("l1_h", "l2sq_h", "none")
CONSTRAINT_KINDS = ("free", "nonneg_both", "nonneg_h")


@dataclass(frozen=True)
class RegularizerSpec:
    """``G(h, x) = theta ||h||_1`` (``l1_h``), ``theta ||h||_2^2`` or zero."""

    kind: str = "l1_h"
    theta: float = 0.01

    def __post_init__(self):
        if self.kind not in REG_KINDS:
            raise ValueError(f"unknown regularizer {self.kind!r}")
        if not self.theta >= 0:
            raise ValueError("theta must be nonnegative")

    def value(self, h):
        if self.kind == "l1_h":
            return self.theta * float(np.sum(np.abs(h)))
        if self.kind == "l2sq_h":
            return self.theta * float(h @ h)
        return 0.0


@dataclass(frozen=True)
class ConstraintSpec:
    """Constraint set, treated as closed: ``free``, ``nonneg_both``, ``nonneg_h``."""

    kind: str = "nonneg_both"

    def __post_init__(self):
        if self.kind not in CONSTRAINT_KINDS:
            raise ValueError(f"unknown constraint {self.kind!r}")

    @property
    def h_nonneg(self):
        return self.kind in ("nonneg_both", "nonneg_h")

    @property
    def x_nonneg(self):
        return self.kind == "nonneg_both"

    def contains(self, z: Point):
        ok = True
        if self.h_nonneg:
            ok = ok and bool(np.all(z.h >= 0))
        if self.x_nonneg:
            ok = ok and bool(np.all(z.x >= 0))
        return ok

    def project(self, z: Point):
        h = np.maximum(z.h, 0) if self.h_nonneg else z.h
        x = np.maximum(z.x, 0) if self.x_nonneg else z.x
        return Point(h, x)


class DeconvProblem:
    """Measurements, operators, regularizer and constraint of one instance.

    Row norms of both operators, ``|y|^2`` and the smooth-adaptable constant
    ``L`` are computed once here.
    """

    def __init__(self, op_b: StructuredOperator, op_a: StructuredOperator, y,
                 reg: RegularizerSpec = None, constraint: ConstraintSpec = None):
        y = np.asarray(y, dtype=complex).reshape(-1)
        if op_b.output_dim != y.size or op_a.output_dim != y.size:
            raise ShapeError(
                f"operator output dims ({op_b.output_dim}, {op_a.output_dim}) "
                f"do not match len(y) = {y.size}")
        self.op_b = op_b
        self.op_a = op_a
        self.y = y
        self.reg = RegularizerSpec() if reg is None else reg
        self.constraint = ConstraintSpec() if constraint is None else constraint
        self.y_abs2 = np.abs(y) ** 2
        self.b_row_norms_sq = np.asarray(op_b.row_norms_sq(), dtype=float)
        self.a_row_norms_sq = np.asarray(op_a.row_norms_sq(), dtype=float)
        self.L = _smad_sum(self.b_row_norms_sq, self.a_row_norms_sq, self.y_abs2)

    @property
    def d1(self):
        return self.op_b.input_dim

    @property
    def d2(self):
        return self.op_a.input_dim

    @property
    def m(self):
        return self.y.size

    def with_options(self, reg=None, constraint=None):
        """Copy sharing operators and cached constants, with a new G or C."""
        new = object.__new__(DeconvProblem)
        new.__dict__.update(self.__dict__)
        if reg is not None:
            new.reg = reg
        if constraint is not None:
            new.constraint = constraint
        return new

    def check(self, z: Point):
        if z.h.size != self.d1 or z.x.size != self.d2:
            raise ShapeError(
                f"point has dims ({z.h.size}, {z.x.size}), "
                f"problem expects ({self.d1}, {self.d2})")

    def forward(self, z: Point):
        """``(Bh, Ax)``."""
        self.check(z)
        return self.op_b.apply(z.h), self.op_a.apply(z.x)

    # the *_from helpers take precomputed (Bh, Ax) so solvers can reuse them

    def loss_from(self, bh, ax):
        return 0.5 * float(np.sum(np.abs(bh * np.conj(ax) - self.y) ** 2))

    def f1_from(self, bh, ax):
        pb = np.abs(bh) ** 2
        qa = np.abs(ax) ** 2
        return float(0.25 * np.sum((pb + qa) ** 2)
                     + 0.5 * (np.sum(self.y_abs2 * pb) + np.sum(qa)
                              + np.sum(self.y_abs2)))

    def f2_from(self, bh, ax):
        r = np.conj(self.y) * bh + ax
        return float(0.25 * np.sum(np.abs(bh) ** 4)
                     + 0.25 * np.sum(np.abs(ax) ** 4)
                     + 0.5 * np.sum(np.abs(r) ** 2))

    def grad_f1_residuals(self, bh, ax):
        """Fourier-domain vectors whose adjoints give the F1 gradient."""
        pb = np.abs(bh) ** 2
        qa = np.abs(ax) ** 2
        return (pb + qa + self.y_abs2) * bh, (pb + qa + 1.0) * ax

    def grad_f2_residuals(self, bh, ax):
        r = np.conj(self.y) * bh + ax
        return np.abs(bh) ** 2 * bh + self.y * r, np.abs(ax) ** 2 * ax + r

    def grad_f_residuals(self, bh, ax):
        res = bh * np.conj(ax) - self.y
        return res * ax, np.conj(res) * bh

    def to_point(self, rb, ra):
        return Point(self.op_b.adjoint_apply(rb), self.op_a.adjoint_apply(ra))


def _smad_sum(b2, a2, y2):
    return float(np.sum(3 * b2 ** 2 + 3 * a2 ** 2 + b2 * a2 + y2 * b2 + a2))


def loss_f(p: DeconvProblem, z: Point) -> float:
    """Squared-error loss ``1/2 ||Bh * conj(Ax) - y||^2``."""
    return p.loss_from(*p.forward(z))


def f1_value(p: DeconvProblem, z: Point) -> float:
    return p.f1_from(*p.forward(z))


def f2_value(p: DeconvProblem, z: Point) -> float:
    return p.f2_from(*p.forward(z))


def grad_f1(p: DeconvProblem, z: Point) -> Point:
    return p.to_point(*p.grad_f1_residuals(*p.forward(z)))


def grad_f2(p: DeconvProblem, z: Point) -> Point:
    return p.to_point(*p.grad_f2_residuals(*p.forward(z)))


def grad_f(p: DeconvProblem, z: Point) -> Point:
    """Gradient of the loss, equal to ``grad_f1 - grad_f2``."""
    return p.to_point(*p.grad_f_residuals(*p.forward(z)))


def reg_value(p: DeconvProblem, z: Point) -> float:
    p.check(z)
    return p.reg.value(z.h)


def objective_psi(p: DeconvProblem, z: Point) -> float:
    """``Psi = F + G``."""
    return loss_f(p, z) + reg_value(p, z)


def smad_bound(p: DeconvProblem) -> float:
    """Smallest ``L`` certified by the row-norm bound, so ``LH - F1`` is convex.

    ``sum_j 3|b_j|^4 + 3|a_j|^4 + |b_j|^2 |a_j|^2 + |y_j|^2 |b_j|^2 + |a_j|^2``
    """
    return p.L
