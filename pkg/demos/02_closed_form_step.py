"""One Bregman proximal step: soft-thresholding plus a scalar cubic."""

import numpy as np

from blinddeconv import (ConstraintSpec, Point, SubproblemInput,
                         bregman_dc_step, positive_cubic_root)
from blinddeconv.oracle import subproblem_oracle

for c in [0.0, 1.0, 1e3, 1e9]:
    t = positive_cubic_root(c)
    print(f"c = {c:8.0e}   t = {t:.15f}   residual = {c * t**3 + t - 1:.1e}")

g = Point(np.array([0.8, -0.05, -1.2]), np.array([-0.3, 0.6]))
for con in ("free", "nonneg_both"):
    inp = SubproblemInput(g, lambda_theta=0.1, constraint=ConstraintSpec(con))
    fast = bregman_dc_step(inp)
    slow = subproblem_oracle(inp)
    print(con, "h =", np.round(fast.h, 6), "x =", np.round(fast.x, 6),
          " oracle gap:", np.linalg.norm((fast - slow).vector()))
