import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blinddeconv import model
from blinddeconv.checks import random_problem
from blinddeconv.model import (ConstraintSpec, DeconvProblem, Point,
                               RegularizerSpec)
from blinddeconv.operators import DenseOperator, ShapeError
from blinddeconv.oracle import DenseOracle, fd_gradient


def scalar_problem(y=2.0, reg=None):
    one = DenseOperator([[1.0]])
    return DeconvProblem(one, one, [y], reg or RegularizerSpec("none"),
                         ConstraintSpec("free"))


ONE = Point(np.array([1.0]), np.array([1.0]))


def test_scalar_hand_values():
    p = scalar_problem()
    assert model.loss_f(p, ONE) == pytest.approx(0.5)
    assert model.f1_value(p, ONE) == pytest.approx(5.5)
    assert model.f2_value(p, ONE) == pytest.approx(5.0)
    assert model.grad_f1(p, ONE).h[0] == pytest.approx(6.0)
    assert model.grad_f2(p, ONE).h[0] == pytest.approx(7.0)
    assert model.grad_f(p, ONE).h[0] == pytest.approx(-1.0)


def test_scalar_fd_gradient_of_f1():
    p = scalar_problem()
    g = fd_gradient(lambda z: model.f1_value(p, z), ONE, 1e-5)
    assert g.h[0] == pytest.approx(6.0, rel=1e-8)


def test_zero_point():
    p = random_problem(np.random.default_rng(0), "dense")
    z = Point.zeros(p.d1, p.d2)
    assert model.f1_value(p, z) == pytest.approx(0.5 * np.sum(p.y_abs2))
    assert model.f2_value(p, z) == 0.0
    for g in (model.grad_f1(p, z), model.grad_f2(p, z)):
        assert np.all(g.vector() == 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_dc_identity_and_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng)
    z = Point(rng.standard_normal(p.d1), rng.standard_normal(p.d2))
    f = model.loss_f(p, z)
    assert abs(f - (model.f1_value(p, z) - model.f2_value(p, z))) \
        <= 1e-10 * (1 + abs(f))
    dense = DenseOracle(p)
    assert dense.loss(z) == pytest.approx(f, rel=1e-10, abs=1e-12)
    assert dense.f1(z) == pytest.approx(model.f1_value(p, z), rel=1e-10)
    assert dense.f2(z) == pytest.approx(model.f2_value(p, z), rel=1e-10,
                                        abs=1e-12)
    assert dense.smad_constant() == pytest.approx(p.L, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng)
    z = Point(rng.standard_normal(p.d1), rng.standard_normal(p.d2))
    for fun, grad in [(model.f1_value, model.grad_f1),
                      (model.f2_value, model.grad_f2),
                      (model.loss_f, model.grad_f)]:
        ref = fd_gradient(lambda u: fun(p, u), z, 1e-5)
        err = np.linalg.norm((ref - grad(p, z)).vector())
        assert err <= 1e-5 * max(1.0, np.linalg.norm(ref.vector()))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_midpoint_convexity(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng)
    a = Point(rng.standard_normal(p.d1), rng.standard_normal(p.d2))
    b = Point(rng.standard_normal(p.d1), rng.standard_normal(p.d2))
    mid = 0.5 * (a + b)
    for fun in (model.f1_value, model.f2_value):
        assert fun(p, mid) <= 0.5 * fun(p, a) + 0.5 * fun(p, b) + 1e-10


def test_regularizer_values():
    h = np.array([1.0, -2.0])
    assert RegularizerSpec("l1_h", 0.01).value(h) == pytest.approx(0.03)
    assert RegularizerSpec("l2sq_h", 0.01).value(np.array([3.0])) \
        == pytest.approx(0.09)
    p = scalar_problem()
    assert model.objective_psi(p, ONE) == model.loss_f(p, ONE)
    p1 = scalar_problem(reg=RegularizerSpec("l1_h", 0.5))
    assert model.objective_psi(p1, ONE) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        RegularizerSpec("l1_h", -1.0)
    with pytest.raises(ValueError):
        RegularizerSpec("tv")


def test_smad_bound_examples():
    one = DenseOperator([[1.0]])
    assert model.smad_bound(DeconvProblem(one, one, [1.0])) == 9.0
    zero = DenseOperator(np.zeros((2, 1)))
    assert model.smad_bound(DeconvProblem(zero, zero, [0.0, 0.0])) == 0.0


def test_constraints():
    z = Point(np.array([1.0, -1.0]), np.array([-2.0, 0.0]))
    both = ConstraintSpec("nonneg_both")
    assert not both.contains(z)
    proj = both.project(z)
    assert both.contains(proj)
    assert np.all(proj.h == [1, 0]) and np.all(proj.x == [0, 0])
    only_h = ConstraintSpec("nonneg_h").project(z)
    assert np.all(only_h.x == z.x)
    assert ConstraintSpec("free").contains(z)
    with pytest.raises(ValueError):
        ConstraintSpec("box")


def test_dimension_errors():
    p = scalar_problem()
    with pytest.raises(ShapeError):
        model.loss_f(p, Point(np.ones(2), np.ones(1)))
    with pytest.raises(ShapeError):
        DeconvProblem(DenseOperator(np.ones((2, 1))),
                      DenseOperator(np.ones((3, 1))), np.ones(2))


def test_with_options_shares_cached_constants():
    p = scalar_problem()
    q = p.with_options(reg=RegularizerSpec("l2sq_h", 1.0))
    assert q.L == p.L and q.op_b is p.op_b
    assert q.reg.kind == "l2sq_h" and p.reg.kind == "none"


def test_point_arithmetic():
    a = Point(np.array([1.0]), np.array([2.0, 3.0]))
    assert a.norm_sq() == 14.0
    assert a.dot(a) == 14.0
    assert np.all((a - a).vector() == 0)
    assert np.all((2 * a).vector() == [2, 4, 6])
    b = Point.from_vector(a.vector(), 1)
    assert np.all(b.x == a.x)
