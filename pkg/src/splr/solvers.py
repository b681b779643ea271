"""Solvers for the two decomposition programs and the error-bound oracles.

The penalized program (quadratic data-fit plus scaled l1 plus trace norm,
optional box on X_S around Y) is solved by exact two-block coordinate
descent; the constrained program (l1/trace norms subject to residual-norm
caps, optional box on X_L) by ADMM, with the residual caps enforced through
a Dykstra projection onto the intersection of the two residual balls.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .incoherence import PreconditionError
from .matrices import as_matrix, thin_svd
from .norms import entrywise_norm, induced_norm, trace_norm
from .prox import (
    clip_entries,
    project_l1_ball,
    project_nuclear_ball,
    prox_l1_box,
    soft_threshold,
    svt,
)

__all__ = [
    "RegularizedConfig",
    "ConstrainedConfig",
    "SolveReport",
    "solve_regularized",
    "solve_constrained",
    "recovery_errors",
    "bound_theorem2",
    "bound_theorem3",
]

# First-order optimality residual required at exit of the penalized solver.
KKT_EXIT_TOL = 1e-6


@dataclass
class RegularizedConfig:
    """Parameters of the penalized solve: lam and mu positive, b the box
    radius on entries of X_S - Y (inf disables it), tol the relative
    objective-decrease stop threshold."""

    lam: float
    mu: float
    b: float = math.inf
    tol: float = 1e-12
    max_iter: int = 100000

    def validate(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.b <= 0:
            raise ValueError("box radius must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class ConstrainedConfig:
    """Parameters of the constrained solve: residual caps eps_v1/eps_star
    (both zero means exact agreement), b the box radius on entries of X_L,
    ADMM penalty and residual tolerance, and the Dykstra inner-loop caps."""

    lam: float
    eps_v1: float = 0.0
    eps_star: float = 0.0
    b: float = math.inf
    admm_penalty: float = 1.0
    tol: float = 1e-9
    max_iter: int = 100000
    dykstra_iters: int = 500
    dykstra_tol: float = 1e-11
    adaptive_penalty: bool = True

    def validate(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.eps_v1 < 0 or self.eps_star < 0:
            raise ValueError("residual caps must be nonnegative")
        if self.b <= 0:
            raise ValueError("box radius must be positive")
        if self.admm_penalty <= 0:
            raise ValueError("admm_penalty must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.dykstra_iters < 1:
            raise ValueError("dykstra_iters must be at least 1")
        if self.dykstra_tol < 0:
            raise ValueError("dykstra_tol must be nonnegative")


@dataclass
class SolveReport:
    """Solution pair plus convergence and feasibility measurements.

    residual_* are the v1 / trace / Frobenius norms of X_S_hat + X_L_hat - Y.
    recovery (when a known target is supplied afterwards) holds the six
    error norms of the two difference matrices; bounds holds oracle values
    attached by the caller.
    """

    X_S_hat: np.ndarray
    X_L_hat: np.ndarray
    iterations: int
    objective: float
    residual_v1: float
    residual_star: float
    residual_v2: float
    converged: bool
    mode: str
    diagnostics: dict = field(default_factory=dict)
    recovery: dict = None
    bounds: dict = None


def recovery_errors(report, target):
    """Six error norms of the solution against a known target pair
    (v1, Frobenius, trace for each difference matrix)."""
    dS = report.X_S_hat - target.X_S
    dL = report.X_L_hat - target.X_L
    return {
        "sparse_v1": entrywise_norm(dS, 1),
        "sparse_v2": entrywise_norm(dS, 2),
        "sparse_trace": trace_norm(dS),
        "lowrank_v1": entrywise_norm(dL, 1),
        "lowrank_v2": entrywise_norm(dL, 2),
        "lowrank_trace": trace_norm(dL),
    }


def _residual_norms(R):
    return entrywise_norm(R, 1), trace_norm(R), entrywise_norm(R, 2)


def _kkt_residual(Y, X_S, X_L_factors, R, lam, mu, b):
    """Worst first-order optimality violation of the penalized program at
    (X_S, X_L), using the precomputed thin factors of X_L.

    The trace-norm block needs -R/mu to project onto X_L's singular
    subspaces as the orientation matrix and to have spectral norm at most
    1; the l1 block needs -R/(lam*mu) to match sign(X_S) on its support and
    stay within [-1, 1] off it, with one-sided relaxations at box-active
    entries.
    """
    U, Vt = X_L_factors
    GL = -R / mu
    if U.shape[1]:
        om = U @ Vt
        PT = U @ (U.T @ GL) + (GL @ Vt.T - U @ (U.T @ (GL @ Vt.T))) @ Vt
        r_L = float(np.abs(PT - om).max())
    else:
        r_L = 0.0
    r_L = max(r_L, max(0.0, induced_norm(GL, "2->2") - 1.0))

    GS = GL / lam
    sg = np.sign(X_S)
    on = sg != 0
    off = ~on
    if np.isinf(b):
        upper = np.zeros_like(on)
        lower = np.zeros_like(on)
    else:
        D = X_S - Y
        edge = 1e-12 * max(1.0, b)
        upper = D >= b - edge
        lower = D <= -b + edge
    interior = ~(upper | lower)
    viol = 0.0
    mask = on & interior
    if mask.any():
        viol = max(viol, float(np.abs(GS[mask] - sg[mask]).max()))
    mask = off & interior
    if mask.any():
        viol = max(viol, max(0.0, float(np.abs(GS[mask]).max()) - 1.0))
    # At a box edge the stationarity equation gains a one-signed multiplier:
    # at the upper edge GS may exceed the plain subgradient, at the lower
    # edge it may fall below it.
    mask = upper
    if mask.any():
        g = np.where(on[mask], sg[mask], -1.0)
        viol = max(viol, max(0.0, float((g - GS[mask]).max())))
    mask = lower
    if mask.any():
        g = np.where(on[mask], sg[mask], 1.0)
        viol = max(viol, max(0.0, float((GS[mask] - g).max())))
    return max(r_L, viol)


def solve_regularized(Y, cfg):
    """Exact alternating block minimization of the penalized objective.

    Each sweep takes the exact prox step in X_S (soft threshold into the
    box around Y) then in X_L (singular-value threshold), so the objective
    never increases. Exit requires both a relative objective decrease at
    most cfg.tol and first-order optimality residuals at most KKT_EXIT_TOL;
    hitting max_iter returns converged=False.
    """
    cfg.validate()
    Y = as_matrix(Y, "Y")
    m, n = Y.shape
    X_S = np.zeros((m, n))
    X_L = np.zeros((m, n))
    factors = (np.zeros((m, 0)), np.zeros((0, n)))
    lam, mu = cfg.lam, cfg.mu
    obj = (0.5 / mu) * float((Y ** 2).sum())
    converged = False
    iterations = 0
    kkt = math.inf
    for iterations in range(1, cfg.max_iter + 1):
        X_S = prox_l1_box(Y - X_L, Y, lam * mu, cfg.b)
        M = Y - X_S
        U, s, Vt = thin_svd(M)
        s = np.maximum(s - mu, 0.0)
        keep = s > 0
        X_L = (U[:, keep] * s[keep]) @ Vt[keep, :] if keep.any() else np.zeros((m, n))
        factors = (U[:, keep], Vt[keep, :])
        R = X_S + X_L - Y
        new_obj = (
            (0.5 / mu) * float((R ** 2).sum())
            + lam * entrywise_norm(X_S, 1)
            + float(s[keep].sum())
        )
        decrease = (obj - new_obj) / max(1.0, abs(obj))
        obj = new_obj
        if decrease <= cfg.tol:
            kkt = _kkt_residual(Y, X_S, factors, R, lam, mu, cfg.b)
            if kkt <= KKT_EXIT_TOL:
                converged = True
                break
    R = X_S + X_L - Y
    rv1, rst, rv2 = _residual_norms(R)
    return SolveReport(
        X_S_hat=X_S, X_L_hat=X_L, iterations=iterations, objective=obj,
        residual_v1=rv1, residual_star=rst, residual_v2=rv2,
        converged=converged, mode="regularized",
        diagnostics={"kkt_residual": kkt, "objective_decrease": decrease},
    )


def _project_residual_set(M, eps_v1, eps_star, max_iters, tol):
    """Euclidean projection onto the intersection of the two residual
    balls via Dykstra's alternating scheme; returns (point, iterations,
    converged)."""
    if entrywise_norm(M, 1) <= eps_v1 and trace_norm(M) <= eps_star:
        return M.copy(), 0, True
    cand = project_l1_ball(M, eps_v1)
    if trace_norm(cand) <= eps_star:
        return cand, 0, True
    cand = project_nuclear_ball(M, eps_star)
    if entrywise_norm(cand, 1) <= eps_v1:
        return cand, 0, True
    x = M.copy()
    p = np.zeros_like(M)
    q = np.zeros_like(M)
    for k in range(1, max_iters + 1):
        y = project_l1_ball(x + p, eps_v1)
        p = x + p - y
        x_new = project_nuclear_ball(y + q, eps_star)
        q = y + q - x_new
        step = float(np.abs(x_new - x).max())
        gap = max(0.0, entrywise_norm(x_new, 1) - eps_v1)
        x = x_new
        if step <= tol and gap <= tol:
            return x, k, True
    return x, max_iters, False


def _clip_lowrank(X_L_cand, X_L_prev, center, eta, b):
    """Box step for the X_L block: clip the threshold output, but refuse to
    move if that would increase the block's augmented objective (trace norm
    plus the quadratic around `center`) relative to the previous, already
    box-feasible iterate."""
    cand = clip_entries(X_L_cand, b)
    if np.array_equal(cand, X_L_cand):
        return cand

    def aug(X):
        return trace_norm(X) + 0.5 * eta * float(((X - center) ** 2).sum())

    before = aug(X_L_prev)
    after = aug(cand)
    if after > before + 1e-12 * max(1.0, abs(before)):
        raise RuntimeError(
            "box clipping of the low-rank update increased the augmented "
            "objective; tighten the box or clip the solution afterwards instead"
        )
    return cand


def _solve_constrained_exact(Y, cfg):
    """ADMM for the eps = 0 case: exact split X_S + X_L = Y."""
    m, n = Y.shape
    lam = cfg.lam
    eta = cfg.admm_penalty
    X_L = np.zeros((m, n))
    W = np.zeros((m, n))
    converged = False
    rescalings = 0
    pri = dua = math.inf
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        X_S = soft_threshold(Y - X_L - W, lam / eta)
        cand = svt(Y - X_S - W, 1.0 / eta)
        if not math.isinf(cfg.b):
            cand = _clip_lowrank(cand, X_L, Y - X_S - W, eta, cfg.b)
        dua = eta * entrywise_norm(cand - X_L, 2)
        X_L = cand
        R = X_S + X_L - Y
        pri = entrywise_norm(R, 2)
        W = W + R
        if pri <= cfg.tol and dua <= cfg.tol:
            converged = True
            break
        if cfg.adaptive_penalty and iterations % 10 == 0:
            if pri > 10.0 * dua:
                eta *= 2.0
                W /= 2.0
                rescalings += 1
            elif dua > 10.0 * pri:
                eta /= 2.0
                W *= 2.0
                rescalings += 1
    rv1, rst, rv2 = _residual_norms(X_S + X_L - Y)
    obj = lam * entrywise_norm(X_S, 1) + trace_norm(X_L)
    return SolveReport(
        X_S_hat=X_S, X_L_hat=X_L, iterations=iterations, objective=obj,
        residual_v1=rv1, residual_star=rst, residual_v2=rv2,
        converged=converged, mode="constrained",
        diagnostics={
            "primal_residual": pri,
            "dual_residual": dua,
            "penalty_final": eta,
            "penalty_rescalings": rescalings,
            "dykstra_warnings": 0,
            "dykstra_total_iterations": 0,
        },
    )


def _solve_constrained_relaxed(Y, cfg):
    """Consensus ADMM for eps > 0: duplicate (X_S, X_L) into (Z_S, Z_L)
    whose sum must sit within the shifted residual-ball intersection,
    reached through a Dykstra projection each sweep."""
    m, n = Y.shape
    lam = cfg.lam
    eta = cfg.admm_penalty
    Z_S = np.zeros((m, n))
    Z_L = np.zeros((m, n))
    W_S = np.zeros((m, n))
    W_L = np.zeros((m, n))
    X_L_prev = np.zeros((m, n))
    converged = False
    rescalings = 0
    warnings = 0
    dyk_total = 0
    pri = math.inf
    dua = math.inf
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        X_S = soft_threshold(Z_S - W_S, lam / eta)
        X_L = svt(Z_L - W_L, 1.0 / eta)
        if not math.isinf(cfg.b):
            X_L = _clip_lowrank(X_L, X_L_prev, Z_L - W_L, eta, cfg.b)
        X_L_prev = X_L
        A_S = X_S + W_S
        A_L = X_L + W_L
        inner_tol = max(cfg.dykstra_tol, min(1e-8, 1e-2 * pri))
        T, dyk_iters, dyk_ok = _project_residual_set(
            A_S + A_L - Y, cfg.eps_v1, cfg.eps_star, cfg.dykstra_iters, inner_tol
        )
        dyk_total += dyk_iters
        if not dyk_ok:
            warnings += 1
        corr = 0.5 * (Y + T - A_S - A_L)
        Z_S_new = A_S + corr
        Z_L_new = A_L + corr
        dua = eta * math.sqrt(
            float(((Z_S_new - Z_S) ** 2).sum()) + float(((Z_L_new - Z_L) ** 2).sum())
        )
        Z_S, Z_L = Z_S_new, Z_L_new
        pri = math.sqrt(
            float(((X_S - Z_S) ** 2).sum()) + float(((X_L - Z_L) ** 2).sum())
        )
        W_S = W_S + X_S - Z_S
        W_L = W_L + X_L - Z_L
        if pri <= cfg.tol and dua <= cfg.tol:
            R = X_S + X_L - Y
            split = entrywise_norm(R - (Z_S + Z_L - Y), 2)
            gap_v1 = max(0.0, entrywise_norm(R, 1) - cfg.eps_v1)
            gap_star = max(0.0, trace_norm(R) - cfg.eps_star)
            if split <= cfg.tol and gap_v1 <= 10.0 * cfg.tol and gap_star <= 10.0 * cfg.tol:
                converged = True
                break
        if cfg.adaptive_penalty and iterations % 10 == 0:
            if pri > 10.0 * dua:
                eta *= 2.0
                W_S /= 2.0
                W_L /= 2.0
                rescalings += 1
            elif dua > 10.0 * pri:
                eta /= 2.0
                W_S *= 2.0
                W_L *= 2.0
                rescalings += 1
    rv1, rst, rv2 = _residual_norms(X_S + X_L - Y)
    obj = lam * entrywise_norm(X_S, 1) + trace_norm(X_L)
    return SolveReport(
        X_S_hat=X_S, X_L_hat=X_L, iterations=iterations, objective=obj,
        residual_v1=rv1, residual_star=rst, residual_v2=rv2,
        converged=converged, mode="constrained",
        diagnostics={
            "primal_residual": pri,
            "dual_residual": dua,
            "penalty_final": eta,
            "penalty_rescalings": rescalings,
            "dykstra_warnings": warnings,
            "dykstra_total_iterations": dyk_total,
        },
    )


def solve_constrained(Y, cfg):
    """ADMM for the constrained program.

    With both residual caps zero this is the exact split X_S + X_L = Y;
    otherwise the residual is driven into the intersection of the two caps
    (a cap of zero on either norm forces a zero residual, so that case
    routes to the exact split as well). Exit requires primal and dual
    residuals at most cfg.tol, and in the relaxed mode also that the
    solution's own residual norms exceed the caps by at most 10*cfg.tol.
    """
    cfg.validate()
    Y = as_matrix(Y, "Y")
    # A zero cap on either residual norm forces a zero residual, so that
    # case is the exact split as well.
    if cfg.eps_v1 == 0 or cfg.eps_star == 0:
        return _solve_constrained_exact(Y, cfg)
    return _solve_constrained_relaxed(Y, cfg)


def bound_theorem2(prof, c, lam, eps_v1, eps_star):
    """Worst-case v1 error of either component for the constrained program
    under residual caps (eps_v1, eps_star)."""
    if c <= 1:
        raise ValueError("c must exceed 1")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    ab = prof.product
    if ab >= 1:
        raise PreconditionError(
            f"alpha*beta = {ab:.6g} is not < 1; the bound does not apply"
        )
    share = 1.0 / (1.0 - 1.0 / c)
    ratio = (2.0 - ab) / (1.0 - ab)
    return (1.0 + share * ratio) * eps_v1 + share * ratio * eps_star / lam


def bound_theorem3(prof, c, lam, mu, eps_2to2, eps_vinf, eps_star_prime,
                   kbar, rbar, b=math.inf):
    """Error bounds for the penalized program: the v1 and v2 bounds on the
    sparse-component error and the trace bound on the low-rank error.

    The v2 bound is min(v1 bound, sqrt(2*b*v1 bound)) when a box radius b
    is in force.
    """
    if c <= 1:
        raise ValueError("c must exceed 1")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    ab = prof.product
    if 1.0 - ab <= 0:
        raise PreconditionError(
            f"alpha*beta = {ab:.6g} is not < 1; the bound does not apply"
        )
    if mu <= 0:
        if eps_2to2 or eps_vinf or eps_star_prime:
            raise ValueError("mu must be positive when perturbation scales are nonzero")
        imu = 0.0
        mu = 0.0
    else:
        imu = 1.0 / mu
    iev = imu * eps_vinf
    ie2 = imu * eps_2to2
    geo = 1.0 / (1.0 - ab)
    core = lam + prof.gamma + iev
    rank_growth = (lam + iev) * (2.0 * kbar * geo) * core \
        + (1.0 + 2.0 * ie2) * 2.0 * rbar * (
            2.0 * prof.alpha_star * geo * core + 1.0 + 2.0 * ie2
        )
    share = 1.0 / (1.0 - 1.0 / c)
    bound_S_v1 = geo * (
        rank_growth * share * mu / lam
        + lam * kbar * mu
        + 2.0 * math.sqrt(kbar * rbar) * mu
        + kbar * eps_vinf
    )
    if math.isinf(b):
        bound_S_v2 = bound_S_v1
    else:
        bound_S_v2 = min(bound_S_v1, math.sqrt(2.0 * b * bound_S_v1))
    bound_L_star = math.sqrt(2.0 * rbar) * bound_S_v2 + eps_star_prime \
        + (rank_growth * share / 2.0 + 2.0 * rbar) * mu
    return bound_S_v1, bound_S_v2, bound_L_star
