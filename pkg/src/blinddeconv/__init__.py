"""Blind deconvolution by Bregman proximal difference-of-convex methods.

The Fourier-domain model ``y = Bh * conj(Ax)`` is fitted by minimizing
``1/2 ||Bh * conj(Ax) - y||^2 + G(h)`` over a kernel ``h`` and wavelet
coefficients ``x``. Solvers: BPDCA, BPDCAe (extrapolated, with restart),
FISTA and alternating minimization.
"""

from .bregman import bregman_distance, kernel_grad, kernel_value
from .experiment import (ExperimentConfig, generate_problem, initial_point,
                         run_comparison)
from .model import (ConstraintSpec, DeconvProblem, Point, RegularizerSpec,
                    f1_value, f2_value, grad_f, grad_f1, grad_f2, loss_f,
                    objective_psi, smad_bound)
from .operators import (DenseOperator, EmbeddingSpec, FourierEmbedding,
                        FourierSynthesis, ShapeError, WaveletSpec,
                        circular_convolve)
from .prox import (SubproblemInput, bregman_dc_step, positive_cubic_root,
                   soft_threshold)
from .solvers import (RunResult, SolverConfig, SolverError, cosine_similarity,
                      random_init, run_am, run_bpdca, run_bpdcae, run_fista,
                      run_solver, spectral_init, stationarity_residual)

__version__ = "0.1.0"
