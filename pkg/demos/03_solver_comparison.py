"""Desk-scale deblurring: BPDCAe against BPDCA, FISTA and AM.

Writes traces, recovered kernels/images and a summary to runs/demo.
Takes roughly ten seconds.
"""

from blinddeconv.experiment import ExperimentConfig, run_comparison

cfg = ExperimentConfig(out="runs/demo")
summary, results = run_comparison(cfg)

print(f"Psi at the ground truth: {summary['psi_true']:.6f}   L = {summary['L']:.1f}")
for tag, s in summary["solvers"].items():
    print(f"{tag:7s} Psi = {s['psi']:.6f}  log10 gap = {s['log10_gap']:7.3f}  "
          f"cos(x, x0) = {s['cossim_x']:.4f}  iters = {s['iterations']:5d}  "
          f"({s['reason']})")

# restarts taken by BPDCAe
restarts = [r.k for r in results["bpdcae"].trace if r.restart]
print("BPDCAe restarts:", len(restarts), "first few:", restarts[:8])
