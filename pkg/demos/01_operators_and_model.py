"""Measurement model on a small grid: operators, the loss and its DC split."""

import numpy as np

from blinddeconv import (DeconvProblem, EmbeddingSpec, FourierEmbedding,
                         FourierSynthesis, Point, WaveletSpec,
                         circular_convolve, f1_value, f2_value, loss_f)

n = 16
shape = (n, n)
op_b = FourierEmbedding(EmbeddingSpec(shape, (3, 3)))   # kernel -> DFT
op_a = FourierSynthesis(shape, WaveletSpec(1, "haar", 1))  # coarse Haar
print("m, d1, d2 =", op_b.output_dim, op_b.input_dim, op_a.input_dim)

rng = np.random.default_rng(0)
h = rng.uniform(0, 1, op_b.input_dim)
x = rng.uniform(0, 1, op_a.input_dim)

# real-space picture: blurred = f * g on the torus
f = op_b.embed(h).ravel()
g = op_a.synthesize(x).ravel()
blurred = circular_convolve(f, g, shape)

# Fourier-domain picture: y = Bh . conj(Ax)
y = op_b.apply(h) * np.conj(op_a.apply(x))
print("y matches F(f * g) / n:",
      np.allclose(y, np.fft.fft2(blurred.reshape(shape), norm="ortho").ravel() / n))

p = DeconvProblem(op_b, op_a, y)
z = Point(h + 0.1, x)
print("F      =", loss_f(p, z))
print("F1 - F2 =", f1_value(p, z) - f2_value(p, z))
print("L bound =", p.L)
