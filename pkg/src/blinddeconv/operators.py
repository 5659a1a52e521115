"""FFT-backed complex linear operators for the Fourier-domain deconvolution model.

All transforms use the unitary DFT (``norm="ortho"``), so every entry of the
DFT matrix has modulus ``1/sqrt(m)``. Signals live on a periodic grid that is
either 1-D of length ``m`` or a square ``n x n`` image with ``m = n**2``,
flattened row-major.

Operators map real vectors to complex vectors. ``adjoint_apply`` returns the
real part of the true adjoint, which is what the real-variable gradients
need: ``Re<apply(v), w> = <v, adjoint_apply(w)>`` for real ``v``.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import wavelets
from .wavelets import WaveletSpec

__all__ = [
    "ShapeError",
    "EmbeddingSpec",
    "WaveletSpec",
    "StructuredOperator",
    "FourierEmbedding",
    "FourierSynthesis",
    "DenseOperator",
    "circular_convolve",
    "grid_shape",
]


class ShapeError(ValueError):
    """Raised when an input vector does not match an operator's dimensions."""


def grid_shape(m: int, ndim: int = 2) -> Tuple[int, ...]:
    """Periodic grid for ``m`` samples: ``(m,)`` or ``(n, n)``."""
    if ndim == 1:
        return (m,)
    n = int(round(np.sqrt(m)))
    if n * n != m:
        raise ShapeError(f"m={m} is not a perfect square")
    return (n, n)


def _fft(a, ndim):
    axes = tuple(range(-ndim, 0))
    return np.fft.fftn(a, axes=axes, norm="ortho")


def _ifft(a, ndim):
    axes = tuple(range(-ndim, 0))
    return np.fft.ifftn(a, axes=axes, norm="ortho")


def _check_len(vec, n, what):
    vec = np.asarray(vec)
    if vec.ndim != 1 or vec.shape[0] != n:
        raise ShapeError(f"{what} must have shape ({n},), got {vec.shape}")
    return vec


class StructuredOperator:
    """Base class: a complex ``output_dim x input_dim`` linear map."""

    kind = None
    input_dim: int
    output_dim: int

    def apply(self, v):
        v = _check_len(v, self.input_dim, "input")
        return self._apply(np.asarray(v, dtype=float))

    def adjoint_apply(self, w):
        """Real part of the adjoint, ``Re(M^H w)``."""
        w = _check_len(w, self.output_dim, "input")
        return self._adjoint(np.asarray(w, dtype=complex)).real

    def adjoint_full(self, w):
        """Complex adjoint ``M^H w``."""
        w = _check_len(w, self.output_dim, "input")
        return self._adjoint(np.asarray(w, dtype=complex))

    def row_norms_sq(self):
        """Squared Euclidean norms of the rows of the operator matrix."""
        # columns in batches; |M_jk|^2 summed over k
        out = np.zeros(self.output_dim)
        step = max(1, min(self.input_dim, 2 ** 22 // max(self.output_dim, 1)))
        for start in range(0, self.input_dim, step):
            stop = min(start + step, self.input_dim)
            basis = np.zeros((stop - start, self.input_dim))
            basis[np.arange(stop - start), np.arange(start, stop)] = 1.0
            cols = self._apply(basis)
            out += np.sum(np.abs(cols) ** 2, axis=0)
        return out

    def __repr__(self):
        return (f"{type(self).__name__}(input_dim={self.input_dim}, "
                f"output_dim={self.output_dim})")


@dataclass(frozen=True)
class EmbeddingSpec:
    """Places a kernel in the top-left corner of the periodic grid.

    ``shape`` is the grid (``(m,)`` or ``(n, n)``), ``kernel_shape`` the
    kernel block (``(d1,)`` or ``(k, k)``).
    """

    shape: Tuple[int, ...]
    kernel_shape: Tuple[int, ...]

    def __post_init__(self):
        if len(self.shape) != len(self.kernel_shape):
            raise ShapeError("kernel and grid must have the same number of axes")
        if any(k > s for k, s in zip(self.kernel_shape, self.shape)):
            raise ShapeError("kernel does not fit into the grid")

    @property
    def m(self):
        return int(np.prod(self.shape))

    @property
    def d1(self):
        return int(np.prod(self.kernel_shape))

    @property
    def kernel_side(self):
        return self.kernel_shape[0]

    def index_map(self):
        """Flat grid index of each kernel entry (row-major)."""
        grids = np.meshgrid(*[np.arange(k) for k in self.kernel_shape],
                            indexing="ij")
        return np.ravel_multi_index([g.ravel() for g in grids], self.shape)


class FourierEmbedding(StructuredOperator):
    """``B = F B~``: zero-pad a kernel into the grid, then take the DFT."""

    kind = "fourier_embedding"

    def __init__(self, spec: EmbeddingSpec):
        self.spec = spec
        self.shape = tuple(spec.shape)
        self.ndim = len(self.shape)
        self.input_dim = spec.d1
        self.output_dim = spec.m
        self._slices = tuple(slice(0, k) for k in spec.kernel_shape)

    def embed(self, v):
        """Real-space embedding ``B~ v`` on the grid (leading batch axes ok)."""
        batch = v.shape[:-1]
        out = np.zeros(batch + self.shape, dtype=v.dtype)
        out[(Ellipsis,) + self._slices] = v.reshape(
            batch + tuple(self.spec.kernel_shape))
        return out

    def _apply(self, v):
        batch = v.shape[:-1]
        return _fft(self.embed(v), self.ndim).reshape(batch + (-1,))

    def _adjoint(self, w):
        batch = w.shape[:-1]
        img = _ifft(w.reshape(batch + self.shape), self.ndim)
        return img[(Ellipsis,) + self._slices].reshape(batch + (-1,))

    def row_norms_sq(self):
        return np.full(self.output_dim, self.input_dim / self.output_dim)


class FourierSynthesis(StructuredOperator):
    """``A`` with ``conj(A) = F A~``, where ``A~`` is a wavelet synthesis.

    ``A~`` maps the retained (coarsest-first) coefficients to the grid through
    the inverse orthogonal wavelet transform. ``apply`` returns
    ``A v = conj(F A~ v)``; use :meth:`apply_conj` for ``conj(A) v``.
    """

    kind = "fourier_synthesis"

    def __init__(self, shape, wavelet: WaveletSpec):
        self.shape = tuple(shape)
        self.ndim = len(self.shape)
        self.wavelet = wavelet
        self.output_dim = int(np.prod(self.shape))
        self.input_dim = wavelets.retained_size(self.shape, wavelet)

    def synthesize(self, v):
        """Real-space image ``A~ v`` (leading batch axes ok)."""
        batch = v.shape[:-1]
        coeffs = np.zeros(batch + (self.output_dim,), dtype=v.dtype)
        coeffs[..., :self.input_dim] = v
        return wavelets.inverse(coeffs, self.wavelet, self.shape)

    def analyze(self, img):
        """``A~^T``: retained wavelet coefficients of a grid signal."""
        coeffs = wavelets.forward(img, self.wavelet, self.ndim)
        return coeffs[..., :self.input_dim]

    def apply_conj(self, v):
        v = _check_len(v, self.input_dim, "input")
        return _fft(self.synthesize(np.asarray(v, dtype=float)),
                    self.ndim).reshape(-1)

    def _apply(self, v):
        batch = v.shape[:-1]
        return np.conj(_fft(self.synthesize(v), self.ndim)).reshape(
            batch + (-1,))

    def _adjoint(self, w):
        # A^H = A~^T F^T and the DFT matrix is symmetric
        batch = w.shape[:-1]
        spec = _fft(w.reshape(batch + self.shape), self.ndim)
        return self.analyze(spec)


class DenseOperator(StructuredOperator):
    """Explicit complex matrix."""

    kind = "dense"

    def __init__(self, matrix):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        self.output_dim, self.input_dim = self.matrix.shape

    def _apply(self, v):
        return v @ self.matrix.T

    def _adjoint(self, w):
        return w @ np.conj(self.matrix)

    def row_norms_sq(self):
        return np.sum(np.abs(self.matrix) ** 2, axis=1)


def circular_convolve(f, g, shape=None):
    """Circular convolution of two equal-length real signals.

    With ``shape`` given (e.g. ``(n, n)``), the flat inputs are treated as
    row-major images and convolved on the 2-D torus.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise ShapeError(f"length mismatch: {f.shape} vs {g.shape}")
    shape = (f.size,) if shape is None else tuple(shape)
    if int(np.prod(shape)) != f.size:
        raise ShapeError(f"shape {shape} does not match length {f.size}")
    ndim = len(shape)
    m = f.size
    # unitary DFT: F(f * g) = sqrt(m) F f . F g
    prod = np.sqrt(m) * _fft(f.reshape(shape), ndim) * _fft(g.reshape(shape), ndim)
    return _ifft(prod, ndim).real.reshape(-1)
