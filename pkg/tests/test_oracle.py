import numpy as np
import pytest

from blinddeconv import checks, oracle
from blinddeconv.bregman import kernel_value
from blinddeconv.model import ConstraintSpec, DeconvProblem, Point
from blinddeconv.operators import (DenseOperator, EmbeddingSpec,
                                   FourierEmbedding, FourierSynthesis,
                                   WaveletSpec)
from blinddeconv.prox import SubproblemInput, bregman_dc_step


def test_densify_examples():
    mat = np.array([[1 + 1j, 2], [0, 3j], [4, 5]])
    assert np.array_equal(oracle.densify(DenseOperator(mat)), mat)
    col = oracle.densify(FourierEmbedding(EmbeddingSpec((4,), (1,))))
    assert col.shape == (4, 1)
    assert np.allclose(col[:, 0], 0.5)


@pytest.mark.parametrize("op", [
    FourierEmbedding(EmbeddingSpec((8, 8), (3, 3))),
    FourierSynthesis((8, 8), WaveletSpec(1, "meyer_approx", 2)),
])
def test_densify_consistency(op):
    mat = oracle.densify(op)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.standard_normal(op.input_dim)
        assert np.allclose(mat @ v, op.apply(v), atol=1e-12)


def test_densify_size_cap():
    op = FourierSynthesis((64, 64), WaveletSpec(1, "haar"))
    with pytest.raises(oracle.OracleError):
        oracle.densify(op)


def test_fd_gradient_examples():
    z = Point(np.array([0.3, -1.0]), np.array([2.0]))
    g = oracle.fd_gradient(lambda u: 0.5 * u.norm_sq(), z, 1e-5)
    assert np.allclose(g.vector(), z.vector(), atol=1e-9)
    e1 = Point(np.array([1.0, 0.0]), np.array([0.0]))
    assert np.allclose(oracle.fd_gradient(kernel_value, e1).vector(),
                       [2, 0, 0], atol=1e-8)
    with pytest.raises(ValueError):
        oracle.fd_gradient(kernel_value, e1, 0.0)


@pytest.mark.parametrize("constraint", ["free", "nonneg_both"])
def test_subproblem_oracle_agrees_with_closed_form(constraint):
    rng = np.random.default_rng(1)
    for _ in range(50):
        inp = checks.random_subproblem(rng, constraint=constraint)
        diff = oracle.subproblem_oracle(inp) - bregman_dc_step(inp)
        assert np.linalg.norm(diff.vector()) <= 1e-6


def test_subproblem_oracle_limits():
    g = Point(np.ones(6), np.ones(6))
    with pytest.raises(oracle.OracleError):
        oracle.subproblem_oracle(SubproblemInput(g))
    small = SubproblemInput(Point(np.ones(2), np.ones(2)),
                            constraint=ConstraintSpec("free"))
    with pytest.raises(oracle.OracleError):
        oracle.subproblem_oracle(small, max_steps=1)


def test_dense_oracle_size_limit():
    big = checks.random_problem(np.random.default_rng(0), "fourier_2d")
    assert big.m == 64
    oracle.DenseOracle(big)
    eye = DenseOperator(np.eye(65))
    with pytest.raises(oracle.OracleError):
        oracle.DenseOracle(DeconvProblem(eye, eye, np.ones(65)))
