"""Command-line front end: decompose an observed matrix, diagnose a target
pair's incoherence and recovery conditions, certify a target pair with a
dual certificate, generate synthetic instances, and run recovery sweeps.

Exit codes: 0 success, 1 I/O or parse failure, 2 non-convergence or an
unsatisfied certificate, 3 precondition failure.
"""

import argparse
import math
import sys
import time

from .certificate import BOUND_NAMES, build_certificate
from .incoherence import (
    PreconditionError,
    check_conditions,
    check_identifiability,
    profile,
    simplified_parameters,
)
from .matrixio import MatrixIOError, read_matrix_csv, write_json, write_matrix_csv
from .solvers import ConstrainedConfig, RegularizedConfig, solve_constrained, solve_regularized
from .subspaces import NeumannNonConvergence, TargetPair
from .sweep import SweepSpec, write_sweep_outputs
from .synth import InstanceSpec, gen_instance

__all__ = ["main"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_NOT_CONVERGED = 2
EXIT_PRECONDITION = 3


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with the I/O/parse code."""

    def error(self, message):
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _positive_or_inf(text):
    if text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(text)


def _parse_int_range(text):
    parts = text.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    if len(parts) == 2:
        lo, hi = int(parts[0]), int(parts[1])
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    raise ValueError(f"expected a or a:b, got {text!r}")


def _parse_float_grid(text):
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) == 3:
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad grid {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(count)]
    raise ValueError(f"expected lo:hi:step, got {text!r}")


def _fallback_lambda(m, n):
    return 1.0 / math.sqrt(max(m, n))


def _derived_lambda(prof, formulation, m, n):
    try:
        lam, _ = simplified_parameters(prof, formulation)
        if lam > 0:
            return lam
    except (PreconditionError, ValueError):
        pass
    return _fallback_lambda(m, n)


def build_parser():
    parser = _Parser(prog="splr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="solve for a sparse + low-rank split of Y")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", required=True, choices=("regularized", "constrained"))
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="trade-off weight; defaults to 1/sqrt(max(m, n))")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--eps-v1", type=float, default=0.0)
    p.add_argument("--eps-star", type=float, default=0.0)
    p.add_argument("--b", type=_positive_or_inf, default=math.inf)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--out-sparse", required=True)
    p.add_argument("--out-lowrank", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("diagnose", help="incoherence profile and recovery conditions of a target pair")
    p.add_argument("--sparse", required=True)
    p.add_argument("--lowrank", required=True)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("certify", help="build and verify a dual certificate for a target pair")
    p.add_argument("--sparse", required=True)
    p.add_argument("--lowrank", required=True)
    p.add_argument("--noise", default=None)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("generate", help="write a synthetic instance to CSV files")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--ktilde", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="recovery success rates over a rank/density grid")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ranks", required=True)
    p.add_argument("--densities", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def cmd_decompose(args):
    Y = read_matrix_csv(args.input)
    if args.lam is None:
        args.lam = _fallback_lambda(*Y.shape)
    start = time.perf_counter()
    if args.mode == "regularized":
        if args.mu is None or args.mu <= 0:
            raise ValueError("regularized mode requires --mu > 0")
        cfg = RegularizedConfig(
            lam=args.lam, mu=args.mu, b=args.b,
            tol=1e-12 if args.tol is None else args.tol,
            max_iter=args.max_iter,
        )
        report = solve_regularized(Y, cfg)
        mu_or_eps = args.mu
    else:
        cfg = ConstrainedConfig(
            lam=args.lam, eps_v1=args.eps_v1, eps_star=args.eps_star, b=args.b,
            tol=1e-9 if args.tol is None else args.tol,
            max_iter=args.max_iter,
        )
        report = solve_constrained(Y, cfg)
        mu_or_eps = [args.eps_v1, args.eps_star]
    wall = time.perf_counter() - start
    write_matrix_csv(args.out_sparse, report.X_S_hat)
    write_matrix_csv(args.out_lowrank, report.X_L_hat)
    write_json(args.report, {
        "mode": report.mode,
        "lambda": args.lam,
        "mu_or_eps": mu_or_eps,
        "iterations": report.iterations,
        "converged": report.converged,
        "objective": report.objective,
        "residual_v1": report.residual_v1,
        "residual_star": report.residual_star,
        "residual_v2": report.residual_v2,
        "wall_time_seconds": wall,
    })
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_diagnose(args):
    X_S = read_matrix_csv(args.sparse)
    X_L = read_matrix_csv(args.lowrank)
    target = TargetPair(X_S, X_L)
    prof = profile(target, rho=args.rho)
    m, n = target.shape
    c = args.c
    mu = 1.0 if args.mu is None else args.mu
    lam_con = args.lam if args.lam is not None else _derived_lambda(prof, "constrained", m, n)
    lam_reg = args.lam if args.lam is not None else _derived_lambda(prof, "regularized", m, n)
    v_con = check_conditions(prof, "constrained", c, lam_con)
    v_reg = check_conditions(prof, "regularized", c, lam_reg, mu=mu)
    payload = {
        "m": m, "n": n,
        "rho": prof.rho, "rho_star": prof.rho_star,
        "a": prof.a, "b": prof.b, "m0": prof.m0, "n0": prof.n0,
        "u": prof.u, "v": prof.v, "w": prof.w, "gamma": prof.gamma,
        "alpha": prof.alpha_star, "beta": prof.beta_star,
        "alpha_beta": prof.product,
        "kbar": prof.kbar, "rbar": prof.rbar,
        "identifiable": check_identifiability(prof),
        "c": c, "mu": mu,
        "constrained_lambda": lam_con,
        "constrained_cond1": v_con.passed[0],
        "constrained_cond2": v_con.passed[1],
        "constrained_cond3": v_con.passed[2],
        "constrained_all_passed": v_con.all_passed,
        "constrained_lambda_min": v_con.lambda_window[0],
        "constrained_lambda_max": v_con.lambda_window[1],
        "regularized_lambda": lam_reg,
        "regularized_cond1": v_reg.passed[0],
        "regularized_cond2": v_reg.passed[1],
        "regularized_cond3": v_reg.passed[2],
        "regularized_all_passed": v_reg.all_passed,
        "regularized_lambda_min": v_reg.lambda_window[0],
        "regularized_lambda_max": v_reg.lambda_window[1],
    }
    write_json(args.report, payload)
    return EXIT_OK


def cmd_certify(args):
    X_S = read_matrix_csv(args.sparse)
    X_L = read_matrix_csv(args.lowrank)
    target = TargetPair(X_S, X_L)
    E = read_matrix_csv(args.noise) if args.noise else None
    try:
        cert = build_certificate(target, E, args.lam, args.mu, args.c)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    cap_support = cert.lam / cert.c
    cap_space = 1.0 / cert.c
    payload = {
        "lambda": cert.lam, "mu": cert.mu, "c": cert.c,
        "eps_2to2": cert.eps_2to2,
        "eps_vinf": cert.eps_vinf,
        "eps_star_prime": cert.eps_star_prime,
        "feasibility_support": cert.feasibility_residuals[0],
        "feasibility_space": cert.feasibility_residuals[1],
        "complement_support": cert.complement_norms[0],
        "complement_support_cap": cap_support,
        "complement_space": cert.complement_norms[1],
        "complement_space_cap": cap_space,
    }
    for name, (measured, bound, ok) in zip(BOUND_NAMES, cert.bound_diagnostics):
        payload[f"{name}_measured"] = measured
        payload[f"{name}_bound"] = bound
        payload[f"{name}_satisfied"] = ok
    all_ok = cert.all_bounds_satisfied
    payload["all_satisfied"] = all_ok
    write_json(args.report, payload)
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


def cmd_generate(args):
    spec = InstanceSpec(
        m=args.m, n=args.n, rbar=args.rank, ktilde=args.ktilde,
        sigma=args.sigma, seed=args.seed,
    )
    inst = gen_instance(spec)
    prefix = args.out_prefix
    write_matrix_csv(f"{prefix}_Y.csv", inst.Y)
    write_matrix_csv(f"{prefix}_XS.csv", inst.target.X_S)
    write_matrix_csv(f"{prefix}_XL.csv", inst.target.X_L)
    write_matrix_csv(f"{prefix}_E.csv", inst.E)
    prof = inst.profile
    write_json(f"{prefix}_meta.json", {
        "m": spec.m, "n": spec.n, "rank": spec.rbar, "ktilde": spec.ktilde,
        "sigma": spec.sigma, "seed": spec.seed,
        "amplitude": spec.amplitude, "magnitude_law": spec.magnitude_law,
        "kbar": prof.kbar, "rbar": prof.rbar,
        "a": prof.a, "b": prof.b, "u": prof.u, "v": prof.v, "w": prof.w,
        "gamma": prof.gamma, "rho_star": prof.rho_star,
        "alpha": prof.alpha_star, "beta": prof.beta_star,
        "alpha_beta": prof.product,
        "identifiable": check_identifiability(prof),
        "eps_2to2": inst.eps_2to2,
        "eps_vinf": inst.eps_vinf,
        "eps_star_prime": inst.eps_star_prime,
    })
    return EXIT_OK


def cmd_sweep(args):
    spec = SweepSpec(
        m=args.m, n=args.n,
        ranks=_parse_int_range(args.ranks),
        densities=_parse_float_grid(args.densities),
        trials=args.trials, base_seed=args.seed,
    )
    write_sweep_outputs(spec, args.out, jobs=max(1, args.jobs))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MatrixIOError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NeumannNonConvergence as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
