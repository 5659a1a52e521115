"""Command-line entry point: ``blinddeconv {generate,solve,compare,check}``."""

import argparse
import sys
from dataclasses import replace

from . import checks, experiment
from .experiment import ExperimentConfig

SOLVER_FLAGS = {
    "max_iters": "max_iters",
    "lam": "lam",
    "rho": "restart_rho",
    "restart_period": "restart_period",
    "inner_fista_iters": "inner_fista_iters",
    "backtrack_eta": "backtrack_eta",
    "lipschitz0": "lipschitz0",
    "tolerance": "tolerance",
}


def _add_common(p):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int, help="noise and random-init seed")
    p.add_argument("--theta", type=float, help="regularization weight")
    p.add_argument("--reg", choices=["l1", "l2", "none"])
    p.add_argument("--init", choices=["spectral", "random"])
    p.add_argument("--noise-scale", type=float,
                   help="Poisson intensity scale (enables Poisson noise)")
    p.add_argument("--out", help="output directory")


def _add_solver_flags(p):
    p.add_argument("--max-iters", type=int)
    p.add_argument("--lambda", dest="lam", type=float,
                   help="Bregman step size (default 0.99 / L)")
    p.add_argument("--rho", type=float, help="BPDCAe restart safeguard")
    p.add_argument("--restart-period", type=int)
    p.add_argument("--inner-fista-iters", type=int)
    p.add_argument("--backtrack-eta", type=float)
    p.add_argument("--lipschitz0", type=float)
    p.add_argument("--tolerance", type=float,
                   help="stationarity tolerance (0 disables early stop)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="blinddeconv",
        description="Blind deconvolution with Bregman proximal DC methods.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a problem and its ground truth")
    _add_common(p)

    p = sub.add_parser("solve", help="run one solver")
    _add_common(p)
    _add_solver_flags(p)
    p.add_argument("--solver", default="bpdcae",
                   choices=["bpdcae", "bpdca", "fista", "am"])

    p = sub.add_parser("compare", help="run all configured solvers")
    _add_common(p)
    _add_solver_flags(p)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args) -> ExperimentConfig:
    cfg = (ExperimentConfig.from_json(args.config) if args.config
           else ExperimentConfig())
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.theta is not None:
        updates["theta"] = args.theta
    if args.reg is not None:
        updates["reg"] = experiment.REG_ALIASES[args.reg]
    if args.init is not None:
        updates["init"] = args.init
    if args.noise_scale is not None:
        updates["noise"] = "poisson"
        updates["noise_scale"] = args.noise_scale
    if args.out is not None:
        updates["out"] = args.out

    solvers = cfg.solvers
    overrides = {field: getattr(args, flag)
                 for flag, field in SOLVER_FLAGS.items()
                 if getattr(args, flag, None) is not None}
    if getattr(args, "solver", None):
        match = [s for s in solvers if s.algorithm == args.solver]
        base = match[0] if match else experiment.SolverConfig(args.solver)
        solvers = [base]
    if overrides:
        solvers = [replace(s, **overrides) for s in solvers]
    updates["solvers"] = solvers
    return replace(cfg, **updates)


def _print_summary(summary):
    print(f"psi_true = {summary['psi_true']:.6g}  L = {summary['L']:.6g}")
    for tag, entry in summary["solvers"].items():
        if "psi" not in entry:
            print(f"{tag:10s} {entry['reason']}")
            continue
        print(f"{tag:10s} psi={entry['psi']:.6g} "
              f"log10_gap={entry['log10_gap']:.3f} "
              f"cossim_h={entry['cossim_h']:.4f} "
              f"cossim_x={entry['cossim_x']:.4f} "
              f"iters={entry['iterations']} ({entry['reason']})")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "check":
        results = checks.run_checks(seed=args.seed)
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else 1

    try:
        cfg = config_from_args(args)
        if args.command == "generate":
            gen = experiment.generate_problem(cfg)
            experiment.write_problem(gen, cfg.out)
            print(f"wrote problem to {cfg.out} (m={gen.problem.m}, "
                  f"d1={gen.problem.d1}, d2={gen.problem.d2}, "
                  f"L={gen.problem.L:.6g})")
            return 0
        summary, _ = experiment.run_comparison(cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_summary(summary)
    print(f"artifacts in {cfg.out}")
    aborted = [t for t, e in summary["solvers"].items() if "psi" not in e
               or str(e.get("reason", "")).startswith("aborted")]
    return 1 if aborted else 0


if __name__ == "__main__":
    sys.exit(main())
