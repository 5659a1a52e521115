"""Orthogonal periodic wavelet transforms on 1-D signals and square images.

Two filter families are available:

``haar``
    The two-tap Haar filter pair, evaluated with strided sums.
``meyer_approx``
    A band-limited Meyer filter pair sampled on the periodic DFT grid of the
    signal at each level. Because the sampled low-pass response satisfies
    the quadrature-mirror condition exactly, the resulting periodic
    transform is orthogonal to machine precision.

Coefficients are stored as one flat vector, ordered by blocks from coarsest
to finest: the approximation block first, then detail blocks of the coarsest
level, and so on. For images each level contributes three detail blocks
(low/high, high/low, high/high along axes 0/1). All blocks are flattened
row-major. Leading batch dimensions are supported throughout.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

__all__ = ["WaveletSpec", "forward", "inverse", "block_sizes", "meyer_lowpass"]

FAMILIES = ("haar", "meyer_approx")


@dataclass(frozen=True)
class WaveletSpec:
    """Orthogonal wavelet transform description.

    Parameters
    ----------
    levels : int
        Number of decomposition levels (>= 1).
    family : str
        ``"haar"`` or ``"meyer_approx"``.
    retained : int, optional
        Number of coefficient blocks kept, coarsest first. ``None`` keeps
        every block (the full, square transform).
    """

    levels: int = 1
    family: str = "haar"
    retained: Optional[int] = None

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown wavelet family {self.family!r}")
        if self.retained is not None and self.retained < 1:
            raise ValueError("retained must be >= 1")


def _check_shape(shape, levels):
    if len(shape) not in (1, 2):
        raise ValueError("only 1-D signals and 2-D images are supported")
    if len(shape) == 2 and shape[0] != shape[1]:
        raise ValueError("images must be square")
    if shape[0] % (2 ** levels):
        raise ValueError(
            f"side {shape[0]} is not divisible by 2**{levels}")


def block_sizes(shape: Tuple[int, ...], levels: int):
    """Sizes of the coefficient blocks, coarsest first."""
    _check_shape(shape, levels)
    ndim = len(shape)
    side = shape[0] >> levels
    sizes = [side ** ndim]
    for lev in range(levels, 0, -1):
        side = shape[0] >> lev
        sizes.extend([side ** ndim] * (2 ** ndim - 1))
    return sizes


def retained_size(shape, spec: WaveletSpec):
    sizes = block_sizes(shape, spec.levels)
    nblocks = len(sizes) if spec.retained is None else spec.retained
    if nblocks > len(sizes):
        raise ValueError(
            f"cannot retain {nblocks} blocks; transform has {len(sizes)}")
    return int(sum(sizes[:nblocks]))


def _meyer_nu(t):
    t = np.clip(t, 0.0, 1.0)
    return t ** 4 * (35 - 84 * t + 70 * t ** 2 - 20 * t ** 3)


def meyer_lowpass(n):
    """Length-``n`` periodic Meyer low-pass filter (real, unit energy)."""
    if n % 2:
        raise ValueError("filter length must be even")
    omega = np.abs(2 * np.pi * np.fft.fftfreq(n))
    # Meyer scaling function evaluated at 2*omega, for |omega| <= pi
    s = 3 * omega / np.pi - 1
    resp = np.where(omega <= np.pi / 3, 1.0,
                    np.where(omega >= 2 * np.pi / 3, 0.0,
                             np.cos(np.pi / 2 * _meyer_nu(s))))
    return np.fft.ifft(np.sqrt(2) * resp).real


def _filters(n, family):
    """Frequency responses of the low/high-pass pair at length ``n``."""
    if family == "haar":
        h = np.zeros(n)
        h[:2] = 1 / np.sqrt(2)
    else:
        h = meyer_lowpass(n)
    idx = np.arange(n)
    # quadrature mirror: g[k] = (-1)^k h[(1 - k) mod n]
    g = (-1.0) ** idx * h[(1 - idx) % n]
    return np.fft.fft(h), np.fft.fft(g)


def _analysis_axis(x, axis, family):
    x = np.moveaxis(x, axis, -1)
    if family == "haar":
        lo = (x[..., 0::2] + x[..., 1::2]) / np.sqrt(2)
        hi = (x[..., 0::2] - x[..., 1::2]) / np.sqrt(2)
    else:
        n = x.shape[-1]
        H, G = _filters(n, family)
        X = np.fft.fft(x, axis=-1)
        # circular correlation with the filter, then keep even shifts
        lo = np.fft.ifft(X * np.conj(H), axis=-1)[..., 0::2]
        hi = np.fft.ifft(X * np.conj(G), axis=-1)[..., 0::2]
        if not np.iscomplexobj(x):
            lo, hi = lo.real, hi.real
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _synthesis_axis(lo, hi, axis, family):
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    half = lo.shape[-1]
    if family == "haar":
        out = np.empty(lo.shape[:-1] + (2 * half,),
                       dtype=np.result_type(lo, hi))
        out[..., 0::2] = (lo + hi) / np.sqrt(2)
        out[..., 1::2] = (lo - hi) / np.sqrt(2)
    else:
        n = 2 * half
        H, G = _filters(n, family)
        up_lo = np.zeros(lo.shape[:-1] + (n,), dtype=lo.dtype)
        up_hi = np.zeros(hi.shape[:-1] + (n,), dtype=hi.dtype)
        up_lo[..., 0::2] = lo
        up_hi[..., 0::2] = hi
        out = np.fft.ifft(np.fft.fft(up_lo, axis=-1) * H
                          + np.fft.fft(up_hi, axis=-1) * G, axis=-1)
        if not (np.iscomplexobj(lo) or np.iscomplexobj(hi)):
            out = out.real
    return np.moveaxis(out, -1, axis)


def forward(signal, spec: WaveletSpec, ndim: int):
    """Full forward transform; returns the flat coefficient vector(s).

    The last ``ndim`` axes of ``signal`` are transformed; any leading axes
    are treated as a batch.
    """
    shape = signal.shape[signal.ndim - ndim:]
    _check_shape(shape, spec.levels)
    batch = signal.shape[:signal.ndim - ndim]
    approx = signal
    details = []
    for _ in range(spec.levels):
        if ndim == 1:
            approx, d = _analysis_axis(approx, -1, spec.family)
            details.append([d])
        else:
            lo, hi = _analysis_axis(approx, -1, spec.family)
            ll, hl = _analysis_axis(lo, -2, spec.family)
            lh, hh = _analysis_axis(hi, -2, spec.family)
            approx = ll
            details.append([lh, hl, hh])
    blocks = [approx]
    for level_blocks in reversed(details):
        blocks.extend(level_blocks)
    return np.concatenate([b.reshape(batch + (-1,)) for b in blocks], axis=-1)


def inverse(coeffs, spec: WaveletSpec, shape: Tuple[int, ...]):
    """Inverse of :func:`forward`; ``coeffs`` has length ``prod(shape)``."""
    sizes = block_sizes(shape, spec.levels)
    ndim = len(shape)
    batch = coeffs.shape[:-1]
    if coeffs.shape[-1] != int(np.prod(shape)):
        raise ValueError("coefficient vector has the wrong length")
    splits = np.cumsum(sizes)[:-1]
    blocks = np.split(coeffs, splits, axis=-1)
    side = shape[0] >> spec.levels
    bshape = (side,) * ndim
    approx = blocks[0].reshape(batch + bshape)
    pos = 1
    for lev in range(spec.levels, 0, -1):
        side = shape[0] >> lev
        bshape = (side,) * ndim
        if ndim == 1:
            d = blocks[pos].reshape(batch + bshape)
            approx = _synthesis_axis(approx, d, -1, spec.family)
            pos += 1
        else:
            lh, hl, hh = (blocks[pos + i].reshape(batch + bshape)
                          for i in range(3))
            lo = _synthesis_axis(approx, hl, -2, spec.family)
            hi = _synthesis_axis(lh, hh, -2, spec.family)
            approx = _synthesis_axis(lo, hi, -1, spec.family)
            pos += 3
    return approx
