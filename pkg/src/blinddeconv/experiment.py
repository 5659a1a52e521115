"""Synthetic deblurring problems and solver comparisons.

A problem is built from an image ``g = A~ x0`` (the image projected onto the
retained wavelet coefficients) and a blur kernel ``f = B~ h0``. The blurred
image ``f * g`` (circular, on the 2-D torus) is optionally corrupted with
Poisson noise and the measurements are ``y = F(f * g + n) / sqrt(m)``.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import io
from .model import ConstraintSpec, DeconvProblem, Point, RegularizerSpec
from .operators import (EmbeddingSpec, FourierEmbedding, FourierSynthesis,
                        WaveletSpec, circular_convolve)
from .solvers import (SolverConfig, SolverError, cosine_similarity,
                      random_init, run_solver, spectral_init)

__all__ = [
    "ExperimentConfig",
    "default_solvers",
    "builtin_image",
    "blur_kernel",
    "add_poisson_noise",
    "generate_problem",
    "initial_point",
    "run_comparison",
    "write_problem",
    "GeneratedProblem",
    "cosine_similarity",
]

REG_ALIASES = {"l1": "l1_h", "l2": "l2sq_h", "none": "none",
               "l1_h": "l1_h", "l2sq_h": "l2sq_h"}


def default_solvers(max_iters=3000, am_iters=300):
    return [SolverConfig("bpdcae", max_iters=max_iters),
            SolverConfig("bpdca", max_iters=max_iters),
            SolverConfig("fista", max_iters=max_iters),
            SolverConfig("am", max_iters=am_iters)]


@dataclass
class ExperimentConfig:
    """Everything needed to build a problem and run a comparison.

    ``image`` is ``"builtin"`` or a path to an 8-bit PGM of side
    ``image_side``. ``blur`` is ``diagonal_line``, ``gaussian`` or
    ``custom_file`` (read from ``blur_file``). ``noise`` is ``none`` or
    ``poisson`` with ``noise_scale`` as the photon-count scale.
    """

    image: str = "builtin"
    image_side: int = 64
    kernel_side: int = 7
    wavelet_levels: int = 1
    wavelet_family: str = "haar"
    wavelet_retained: Optional[int] = 1
    blur: str = "diagonal_line"
    blur_sigma: float = 1.0
    blur_file: Optional[str] = None
    noise: str = "none"
    noise_scale: float = 100.0
    reg: str = "l1_h"
    theta: float = 0.01
    constraint: str = "nonneg_both"
    init: str = "spectral"
    seed: int = 0
    solvers: List[SolverConfig] = field(default_factory=default_solvers)
    out: str = "runs/default"

    def __post_init__(self):
        self.reg = REG_ALIASES.get(self.reg, self.reg)
        self.solvers = [s if isinstance(s, SolverConfig) else SolverConfig(**s)
                        for s in self.solvers]
        if self.kernel_side > self.image_side:
            raise ValueError("kernel_side must not exceed image_side")
        if self.blur not in ("diagonal_line", "gaussian", "custom_file"):
            raise ValueError(f"unknown blur {self.blur!r}")
        if self.noise not in ("none", "poisson"):
            raise ValueError(f"unknown noise model {self.noise!r}")
        if self.init not in ("spectral", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.noise == "poisson" and not self.noise_scale > 0:
            raise ValueError("noise_scale must be positive")

    @property
    def wavelet(self):
        return WaveletSpec(self.wavelet_levels, self.wavelet_family,
                           self.wavelet_retained)

    def to_dict(self):
        d = asdict(self)
        d["solvers"] = [asdict(s) for s in self.solvers]
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def builtin_image(side=64, block=2):
    """Smooth synthetic scene with values in ``[0, 1]``.

    The pattern is drawn on a ``side // block`` grid and replicated over
    ``block x block`` pixels, so it lies exactly in the span of the Haar
    approximation coefficients at level ``log2(block)``.
    """
    n = side // block
    u, v = np.meshgrid(np.linspace(0, 1, n, endpoint=False),
                       np.linspace(0, 1, n, endpoint=False), indexing="ij")
    img = 0.25 + 0.15 * np.sin(2 * np.pi * u) * np.cos(2 * np.pi * v)
    for cu, cv, amp, width in [(0.3, 0.35, 0.55, 0.08), (0.65, 0.6, 0.45, 0.12),
                               (0.7, 0.25, 0.35, 0.05), (0.25, 0.75, 0.3, 0.1)]:
        img += amp * np.exp(-((u - cu) ** 2 + (v - cv) ** 2) / (2 * width ** 2))
    img = (img - img.min()) / (img.max() - img.min())
    img = 0.05 + 0.9 * img
    return np.kron(img, np.ones((block, block)))


def blur_kernel(kind, side, sigma=1.0, path=None):
    """Nonnegative ``side x side`` blur kernel with unit sum."""
    if kind == "diagonal_line":
        ker = np.eye(side)
    elif kind == "gaussian":
        c = (side - 1) / 2
        i, j = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
        ker = np.exp(-((i - c) ** 2 + (j - c) ** 2) / (2 * sigma ** 2))
    elif kind == "custom_file":
        if path is None:
            raise ValueError("custom_file blur needs blur_file")
        ker = io.read_pgm(path)
        if ker.shape != (side, side):
            raise ValueError(f"kernel file is {ker.shape}, expected "
                             f"{(side, side)}")
    else:
        raise ValueError(f"unknown blur {kind!r}")
    if np.any(ker < 0) or ker.sum() <= 0:
        raise ValueError("blur kernel must be nonnegative and nonzero")
    return ker / ker.sum()


def add_poisson_noise(ytilde, intensity_scale, seed=0):
    """Poisson counts at ``intensity_scale`` photons per unit, rescaled back.

    Returns ``(noisy, sigma)`` where ``sigma`` is the empirical standard
    deviation of the added noise. Negative inputs are clipped to zero first.
    """
    if not intensity_scale > 0:
        raise ValueError("intensity_scale must be positive")
    rng = np.random.default_rng(seed)
    clean = np.maximum(np.asarray(ytilde, dtype=float), 0.0)
    noisy = rng.poisson(intensity_scale * clean) / intensity_scale
    return noisy, float(np.std(noisy - clean))


@dataclass
class GeneratedProblem:
    problem: DeconvProblem
    truth: Point
    kernel: np.ndarray
    image: np.ndarray
    blurred: np.ndarray
    noise_sigma: float = 0.0


def generate_problem(cfg: ExperimentConfig) -> GeneratedProblem:
    """Build the measurement model and ground truth described by ``cfg``."""
    n = cfg.image_side
    shape = (n, n)
    op_b = FourierEmbedding(EmbeddingSpec(shape, (cfg.kernel_side,) * 2))
    op_a = FourierSynthesis(shape, cfg.wavelet)

    if cfg.image == "builtin":
        raw = builtin_image(n, block=2 ** cfg.wavelet_levels)
    else:
        raw = io.read_pgm(cfg.image)
        if raw.shape != shape:
            raise ValueError(f"image is {raw.shape}, expected {shape}")
    x_true = op_a.analyze(raw)
    image = op_a.synthesize(x_true)

    kernel = blur_kernel(cfg.blur, cfg.kernel_side, cfg.blur_sigma,
                         cfg.blur_file)
    h_true = kernel.ravel()
    f = op_b.embed(h_true)
    blurred = circular_convolve(f.ravel(), image.ravel(), shape)
    sigma = 0.0
    if cfg.noise == "poisson":
        blurred, sigma = add_poisson_noise(blurred, cfg.noise_scale, cfg.seed)
    y = np.fft.fft2(blurred.reshape(shape), norm="ortho").ravel() / n

    problem = DeconvProblem(op_b, op_a, y,
                            RegularizerSpec(cfg.reg, cfg.theta),
                            ConstraintSpec(cfg.constraint))
    return GeneratedProblem(problem, Point(h_true, x_true), kernel, image,
                            blurred.reshape(shape), sigma)


def initial_point(problem: DeconvProblem, cfg: ExperimentConfig) -> Point:
    """Spectral or uniform-random start, projected onto the constraint set."""
    if cfg.init == "spectral":
        z0 = spectral_init(problem)
    else:
        z0 = random_init(problem.d1, problem.d2, seed=cfg.seed)
    return problem.constraint.project(z0)


def _solver_tag(cfgs):
    """Unique file stem per solver (``fista``, ``fista_2``, ...)."""
    seen = {}
    tags = []
    for s in cfgs:
        seen[s.algorithm] = seen.get(s.algorithm, 0) + 1
        n = seen[s.algorithm]
        tags.append(s.algorithm if n == 1 else f"{s.algorithm}_{n}")
    return tags


def write_problem(gen: GeneratedProblem, out):
    """Write measurements, ground truth and images of a generated problem."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    p = gen.problem
    np.savez(out / "problem.npz", y=p.y, h_true=gen.truth.h,
             x_true=gen.truth.x, kernel=gen.kernel, image=gen.image,
             blurred=gen.blurred)
    io.write_pgm(out / "kernel.pgm", gen.kernel)
    io.write_pgm(out / "image.pgm", gen.image)
    io.write_pgm(out / "blurred.pgm", gen.blurred)


def _final_metrics(result, truth, problem, psi_true):
    z = result.z
    psi = float(result.trace[-1].psi)
    gap = abs(psi - psi_true)
    return {
        "psi": psi,
        "loss": float(result.trace[-1].loss),
        "log10_gap": math.log10(gap) if gap > 0 else -math.inf,
        "cossim_h": result.trace[-1].cossim_h,
        "cossim_x": result.trace[-1].cossim_x,
        "iterations": result.iterations,
        "seconds": result.trace[-1].seconds,
        "reason": result.reason,
        "h_norm": float(np.linalg.norm(z.h)),
        "x_norm": float(np.linalg.norm(z.x)),
    }


def run_comparison(cfg: ExperimentConfig, out=None, write=True):
    """Run every configured solver from a common start and emit artifacts.

    Per solver ``<tag>_trace.csv``, ``<tag>_times.csv``, ``<tag>_kernel.pgm``
    and ``<tag>_image.pgm`` are written to ``out`` (default ``cfg.out``),
    plus ``summary.json``, ``summary.csv`` and ``config.json``. A solver
    that aborts is recorded in the summary; the others still run.

    Returns ``(summary, results)`` where ``results`` maps tags to
    :class:`RunResult` objects (``None`` for an abort without partial run).
    """
    gen = generate_problem(cfg)
    problem = gen.problem
    truth = gen.truth
    psi_true = float(problem.loss_from(*problem.forward(truth))
                     + problem.reg.value(truth.h))
    z0 = initial_point(problem, cfg)
    out = Path(cfg.out if out is None else out)
    if write:
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "config.json", cfg.to_dict())

    summary = {"psi_true": psi_true, "L": float(problem.L),
               "m": problem.m, "d1": problem.d1, "d2": problem.d2,
               "noise_sigma": gen.noise_sigma, "solvers": {}}
    results = {}
    side = cfg.kernel_side
    for tag, scfg in zip(_solver_tag(cfg.solvers), cfg.solvers):
        try:
            result = run_solver(problem, scfg, z0, truth)
        except (SolverError, ValueError) as exc:
            result = getattr(exc, "result", None)
            if result is None or not result.trace:
                summary["solvers"][tag] = {"algorithm": scfg.algorithm,
                                           "reason": f"aborted: {exc}"}
                results[tag] = None
                continue
        results[tag] = result
        entry = {"algorithm": scfg.algorithm}
        entry.update(_final_metrics(result, truth, problem, psi_true))
        summary["solvers"][tag] = entry
        if write:
            io.write_trace_csv(out / f"{tag}_trace.csv", result.trace, psi_true)
            io.write_times_csv(out / f"{tag}_times.csv", result.trace)
            io.write_pgm(out / f"{tag}_kernel.pgm",
                         result.z.h.reshape(side, side))
            io.write_pgm(out / f"{tag}_image.pgm",
                         problem.op_a.synthesize(result.z.x))
    if write:
        io.write_json(out / "summary.json", _jsonable(summary))
        _write_summary_csv(out / "summary.csv", summary)
    return summary, results


SUMMARY_COLUMNS = ["solver", "algorithm", "psi", "log10_gap", "cossim_h",
                   "cossim_x", "iterations", "seconds", "reason"]


def _write_summary_csv(path, summary):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for tag, entry in summary["solvers"].items():
            writer.writerow([tag] + [entry.get(c, "") for c in
                                     SUMMARY_COLUMNS[1:]])


def _jsonable(obj):
    # JSON has no nan/inf; store them as strings
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj
