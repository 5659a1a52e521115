import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blinddeconv.operators import (DenseOperator, EmbeddingSpec,
                                   FourierEmbedding, FourierSynthesis,
                                   ShapeError, WaveletSpec, circular_convolve,
                                   grid_shape)
from blinddeconv.oracle import densify


def _ops():
    rng = np.random.default_rng(0)
    return [
        FourierEmbedding(EmbeddingSpec((4,), (1,))),
        FourierEmbedding(EmbeddingSpec((16,), (3,))),
        FourierEmbedding(EmbeddingSpec((8, 8), (3, 3))),
        FourierSynthesis((8,), WaveletSpec(1, "haar")),
        FourierSynthesis((16,), WaveletSpec(2, "meyer_approx", 2)),
        FourierSynthesis((8, 8), WaveletSpec(1, "haar", 1)),
        FourierSynthesis((8, 8), WaveletSpec(2, "meyer_approx", 3)),
        DenseOperator(rng.standard_normal((6, 3))
                      + 1j * rng.standard_normal((6, 3))),
    ]


def test_embedding_delta_is_constant():
    op = FourierEmbedding(EmbeddingSpec((4,), (1,)))
    assert np.allclose(op.apply(np.array([1.0])), 0.5)
    assert np.allclose(op.adjoint_apply(np.array([1, 0, 0, 0], complex)), 0.5)
    assert np.allclose(op.row_norms_sq(), 0.25)


def test_dense_identity():
    op = DenseOperator(np.eye(2))
    assert np.allclose(op.apply(np.array([3.0, 4.0])), [3, 4])
    assert np.allclose(op.adjoint_apply(np.array([1 + 2j, 3])), [1, 3])
    assert np.allclose(DenseOperator(np.eye(3)).row_norms_sq(), 1)


def test_haar_synthesis_first_column_matches_dense_replica():
    op = FourierSynthesis((4,), WaveletSpec(1, "haar"))
    # first inverse-Haar basis vector on 4 samples: (1, 1, 0, 0) / sqrt 2
    basis = np.array([1, 1, 0, 0]) / np.sqrt(2)
    expected = np.conj(np.fft.fft(basis, norm="ortho"))
    assert np.allclose(op.apply(np.eye(4)[0]), expected, atol=1e-12)
    assert np.allclose(densify(op)[:, 0], expected, atol=1e-12)


def test_full_synthesis_rows_have_unit_norm():
    op = FourierSynthesis((8,), WaveletSpec(1, "haar"))
    assert np.allclose(op.row_norms_sq(), 1.0, atol=1e-12)


@pytest.mark.parametrize("op", _ops(), ids=lambda o: repr(o))
def test_adjoint_identity(op):
    rng = np.random.default_rng(1)
    for _ in range(10):
        v = rng.standard_normal(op.input_dim)
        w = rng.standard_normal(op.output_dim) \
            + 1j * rng.standard_normal(op.output_dim)
        lhs = np.real(np.vdot(w, op.apply(v)))
        assert abs(lhs - v @ op.adjoint_apply(w)) <= 1e-10 * (1 + abs(lhs))
    v = rng.standard_normal(op.input_dim)
    av = op.apply(v)
    assert np.isclose(v @ op.adjoint_apply(av), np.vdot(av, av).real)


@pytest.mark.parametrize("op", _ops(), ids=lambda o: repr(o))
def test_matches_dense_replica(op):
    mat = densify(op)
    rng = np.random.default_rng(2)
    w = rng.standard_normal(op.output_dim) + 1j * rng.standard_normal(
        op.output_dim)
    assert np.allclose(op.adjoint_apply(w), np.real(mat.conj().T @ w),
                       atol=1e-12)
    assert np.allclose(op.row_norms_sq(), np.sum(np.abs(mat) ** 2, axis=1),
                       atol=1e-12)


def test_synthesis_conjugate_apply():
    op = FourierSynthesis((8, 8), WaveletSpec(1, "haar", 1))
    v = np.random.default_rng(3).standard_normal(op.input_dim)
    assert np.allclose(op.apply_conj(v), np.conj(op.apply(v)))
    img = op.synthesize(v)
    assert np.allclose(op.analyze(img), v)


def test_shape_errors():
    op = FourierEmbedding(EmbeddingSpec((4,), (2,)))
    with pytest.raises(ShapeError):
        op.apply(np.ones(3))
    with pytest.raises(ShapeError):
        op.adjoint_apply(np.ones(5))
    with pytest.raises(ShapeError):
        EmbeddingSpec((4,), (5,))
    with pytest.raises(ShapeError):
        grid_shape(10)
    assert grid_shape(16) == (4, 4)


def test_index_map_is_injective():
    idx = EmbeddingSpec((8, 8), (3, 3)).index_map()
    assert len(set(idx.tolist())) == 9
    assert idx.tolist() == [0, 1, 2, 8, 9, 10, 16, 17, 18]


def test_convolution_examples():
    g = np.array([1.0, 2, 3, 4])
    assert np.allclose(circular_convolve(np.eye(4)[0], g), g)
    assert np.allclose(circular_convolve(np.eye(4)[1], g), [4, 1, 2, 3])
    with pytest.raises(ShapeError):
        circular_convolve(np.ones(3), np.ones(4))


def _direct(f, g):
    m = f.size
    return np.array([sum(f[j] * g[(i - j) % m] for j in range(m))
                     for i in range(m)])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 24))
def test_convolution_matches_direct_sum(seed, m):
    rng = np.random.default_rng(seed)
    f, g = rng.standard_normal(m), rng.standard_normal(m)
    out = circular_convolve(f, g)
    assert np.allclose(out, _direct(f, g), atol=1e-12)
    lhs = np.fft.fft(out, norm="ortho")
    rhs = np.sqrt(m) * np.fft.fft(f, norm="ortho") * np.fft.fft(g, norm="ortho")
    assert np.allclose(lhs, rhs, atol=1e-10 * (1 + np.abs(lhs).max()))


def test_convolution_2d_torus():
    rng = np.random.default_rng(4)
    f = rng.standard_normal((4, 4))
    g = rng.standard_normal((4, 4))
    out = circular_convolve(f.ravel(), g.ravel(), (4, 4)).reshape(4, 4)
    ref = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            ref += f[a, b] * np.roll(np.roll(g, a, 0), b, 1)
    assert np.allclose(out, ref, atol=1e-12)
