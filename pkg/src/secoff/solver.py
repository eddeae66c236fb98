"""Lagrange dual decomposition solver.

For fixed multipliers the Lagrangian splits into one cubic problem per user
(local bits) and one assignment problem per subcarrier (owner and power), both
solved in closed form. The dual is maximized with an ellipsoid method and a
feasible primal is recovered by fixing the subcarrier assignment at the dual
optimum and re-solving each user's convex problem exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .model import (
    LN2,
    Allocation,
    ChannelSet,
    SolveReport,
    Status,
    SystemConfig,
    UserProfile,
    check_constraints,
    max_local_bits,
    per_user_capacity_bound,
    secrecy_rate,
    total_weighted_energy,
)


@dataclass
class SolverOptions:
    max_iters: int = 2000
    dual_tol: float = 1e-5
    initial_radius: float = 10.0
    radius_growth: float = 2.0
    repair: bool = True
    max_restarts: int = 40
    # False forces l_k = 0 (secure full offloading)
    allow_local: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.dual_tol > 0 and self.initial_radius > 0):
            raise ValueError("tolerances and radius must be > 0")
        if not self.radius_growth > 1:
            raise ValueError("radius_growth must be > 1")


@dataclass
class DualState:
    lam: np.ndarray
    ellipsoid_center: np.ndarray
    ellipsoid_shape: np.ndarray
    best_dual_j: float
    best_lambda: np.ndarray
    iterations: int = 0
    restarts: int = 0
    converged: bool = False
    best_history: List[float] = field(default_factory=list)
    allow_local: bool = True


# ---------------------------------------------------------------------------
# closed-form subproblem solutions

def optimal_local_bits(lambda_k: float, u: UserProfile, cfg: SystemConfig) -> float:
    """Minimizer of alpha*zeta*C^3 l^3 / T^2 - lambda*l over [0, l_max]."""
    if lambda_k <= 0:
        return 0.0
    T = cfg.block_time_s
    C = u.cycles_per_bit
    l = math.sqrt(lambda_k * T * T / (3.0 * u.energy_weight * u.cap_coeff_j_per_cycle * C ** 3))
    return min(l, max_local_bits(u, cfg))


def _power_scalar(lam: float, h: float, g: float, alpha: float, B: float) -> float:
    d = h - g
    if d <= 0.0:
        return 0.0
    c = lam * B / (LN2 * alpha)
    if g == 0.0:
        p = c - 1.0 / h
    else:
        x = c * d
        p = 2.0 * (x - 1.0) / (math.sqrt(d * d + 4.0 * h * g * x) + h + g)
    return p if p > 0.0 else 0.0


def optimal_power(lambda_k, h, g, alpha_k, B):
    """Power minimizing psi on one subcarrier; broadcasts over array inputs.

    Three cases: zero when h <= g, water-filling when g == 0, otherwise the
    positive root of h*g*p^2 + (h+g)*p + 1 - c*(h-g) = 0 with
    c = lambda*B / (ln2 * alpha). That root is evaluated in the
    cancellation-free form 2(c(h-g) - 1) / (sqrt(Delta) + h + g).
    """
    if all(isinstance(v, (float, int)) for v in (lambda_k, h, g, alpha_k)):
        return _power_scalar(float(lambda_k), float(h), float(g), float(alpha_k), B)
    lam, h, g, alpha = np.broadcast_arrays(*(np.asarray(v, dtype=float)
                                             for v in (lambda_k, h, g, alpha_k)))
    c = lam * B / (LN2 * alpha)
    d = h - g
    x = c * d
    with np.errstate(divide="ignore", invalid="ignore"):
        water = c - 1.0 / h
        delta = d * d + 4.0 * h * g * x
        general = 2.0 * (x - 1.0) / (np.sqrt(delta) + h + g)
    p = np.where(g == 0.0, water, general)
    p = np.where(d > 0.0, np.maximum(p, 0.0), 0.0)
    return float(p) if p.ndim == 0 else p


def psi(p, lambda_k, h, g, alpha_k, B, T):
    """Per-subcarrier Lagrangian term when this user owns the subcarrier."""
    p = np.asarray(p, dtype=float)
    bits = np.maximum((np.log1p(h * p) - np.log1p(g * p)) / LN2, 0.0)
    out = alpha_k * p * T - lambda_k * T * B * bits
    return float(out) if out.ndim == 0 else out


def _arrays(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
            allow_local: bool = True):
    T = cfg.block_time_s
    alpha = np.array([u.energy_weight for u in users], dtype=float)
    lcoef = np.array([u.cap_coeff_j_per_cycle * u.cycles_per_bit ** 3 / T ** 2 for u in users])
    if allow_local:
        lmax = np.array([max_local_bits(u, cfg) for u in users])
    else:
        lmax = np.zeros(len(users))
    L = np.array([u.task_bits for u in users], dtype=float)
    h = np.ascontiguousarray(channels.h)
    g = np.ascontiguousarray(channels.g)
    if h.shape[0] != len(users):
        raise ValueError(f"channels have {h.shape[0]} users, profile list has {len(users)}")
    return h, g, alpha, lcoef, lmax, L


def assign_subcarrier(n: int, lam, channels: ChannelSet, users: Sequence[UserProfile],
                      cfg: SystemConfig) -> Tuple[int, float]:
    """Owner of subcarrier ``n`` and its power; ties go to the lowest user index."""
    lam = np.asarray(lam, dtype=float)
    alpha = np.array([u.energy_weight for u in users])
    h = channels.h[:, n]
    g = channels.g[:, n]
    p = optimal_power(lam, h, g, alpha, cfg.bandwidth_hz)
    vals = psi(p, lam, h, g, alpha, cfg.bandwidth_hz, cfg.block_time_s)
    k = int(np.argmin(vals))
    return k, float(p[k])


def _candidate(l, owner, pwin, K) -> Allocation:
    N = len(owner)
    power = np.zeros((K, N))
    power[owner, np.arange(N)] = pwin
    return Allocation(np.array(l, dtype=float), np.array(owner), power)


def dual_eval(lam, channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
              allow_local: bool = True) -> Tuple[float, Allocation]:
    """Dual function value at ``lam`` and the Lagrangian minimizer that attains it."""
    lam = np.ascontiguousarray(lam, dtype=float)
    if (lam < 0).any():
        raise ValueError("dual variables must be non-negative")
    h, g, alpha, lcoef, lmax, L = _arrays(channels, users, cfg, allow_local)
    value, l, owner, pwin, _ = kernels.dual_eval_core(
        lam, h, g, alpha, lcoef, lmax, L, cfg.bandwidth_hz, cfg.block_time_s)
    return float(value), _candidate(l, owner, pwin, len(users))


def subgradient(lam, candidate: Allocation, channels: ChannelSet,
                users: Sequence[UserProfile], cfg: SystemConfig) -> np.ndarray:
    """(L_k - l_k) - T * R_k evaluated on the Lagrangian minimizer at ``lam``."""
    theta = candidate.theta()
    g = channels.g
    out = np.empty(len(users))
    for k, u in enumerate(users):
        rate = secrecy_rate(theta[k], candidate.power[k], channels.h[k], g[k], cfg)
        out[k] = u.task_bits - candidate.local_bits[k] - cfg.block_time_s * rate
    return out


# ---------------------------------------------------------------------------
# ellipsoid method on the dual

def initial_center(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
                   allow_local: bool = True) -> np.ndarray:
    """Starting multipliers.

    With local computing: the multiplier at which the local-bits response
    equals L_k, an upper bound on the optimum while L_k <= l_max. Without it:
    the multiplier at which the user's best subcarrier starts transmitting.
    """
    h, g, alpha, lcoef, lmax, L = _arrays(channels, users, cfg, allow_local)
    if allow_local:
        return 3.0 * alpha * lcoef * L ** 2
    gap = np.max(h - g, axis=1)
    lam0 = np.zeros(len(users))
    ok = (gap > 0) & (L > 0)
    lam0[ok] = alpha[ok] * LN2 / (cfg.bandwidth_hz * gap[ok])
    return lam0


def _cut(x, P, a, beta):
    """Deep cut keeping {z : a.(z - x) <= -beta}; returns (x, P, ok)."""
    K = len(x)
    Pa = P @ a
    aPa = float(a @ Pa)
    if not aPa > 0:
        return x, P, False
    root = math.sqrt(aPa)
    depth = beta / root
    if depth >= 1.0:
        # numerical collapse: the remaining ellipsoid is already past the cut
        return x, P, False
    gt = Pa / root
    if K == 1:
        # interval update
        half = math.sqrt(P[0, 0])
        lo = x[0] - half
        hi = x[0] + half
        if a[0] > 0:
            hi = min(hi, x[0] - beta / a[0])
        else:
            lo = max(lo, x[0] - beta / a[0])
        return np.array([(lo + hi) / 2]), np.array([[((hi - lo) / 2) ** 2]]), True
    x = x - (1.0 + K * depth) / (K + 1) * gt
    P = (K * K / (K * K - 1.0)) * (1.0 - depth * depth) * (
        P - (2.0 * (1.0 + K * depth) / ((K + 1) * (1.0 + depth))) * np.outer(gt, gt))
    P = 0.5 * (P + P.T)
    return x, P, True


def solve_dual(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
               opts: Optional[SolverOptions] = None) -> DualState:
    opts = opts or SolverOptions()
    h, g, alpha, lcoef, lmax, L = _arrays(channels, users, cfg, opts.allow_local)
    B, T = cfg.bandwidth_hz, cfg.block_time_s
    K = len(users)

    def evaluate(lam):
        return kernels.dual_eval_core(lam, h, g, alpha, lcoef, lmax, L, B, T)

    if not (L > 0).any():
        zero = np.zeros(K)
        return DualState(zero, zero, np.eye(K), 0.0, zero, converged=True,
                         best_history=[0.0], allow_local=opts.allow_local)

    lam0 = initial_center(channels, users, cfg, opts.allow_local)
    radius = opts.initial_radius * float(np.linalg.norm(lam0))
    best = -math.inf
    best_lam = np.zeros(K)
    history: List[float] = []
    iters = 0
    converged = False
    x = lam0.copy()
    P = np.eye(K)

    # lam = 0 is always dual feasible; seed the incumbent with it
    best = float(evaluate(best_lam)[0])

    restart = 0
    for restart in range(opts.max_restarts + 1):
        x = lam0.copy()
        P = np.eye(K) * radius ** 2
        converged = False
        for _ in range(opts.max_iters):
            iters += 1
            k_neg = int(np.argmin(x))
            if x[k_neg] < 0:
                a = np.zeros(K)
                a[k_neg] = -1.0
                beta = -x[k_neg]
            else:
                value, l, owner, pwin, off = evaluate(x)
                s = L - l - off
                if value > best:
                    best = float(value)
                    best_lam = x.copy()
                cert = math.sqrt(max(float(s @ P @ s), 0.0))
                if cert <= opts.dual_tol * max(abs(best), 1e-300) or not s.any():
                    history.append(best)
                    converged = True
                    break
                a = -s
                beta = max(best - float(value), 0.0)
            history.append(best)
            x, P, ok = _cut(x, P, a, beta)
            if not ok:
                converged = True
                break
        if np.linalg.norm(best_lam - lam0) < 0.99 * radius:
            break
        radius *= opts.radius_growth
    return DualState(lam=best_lam.copy(), ellipsoid_center=x, ellipsoid_shape=P,
                     best_dual_j=best, best_lambda=best_lam, iterations=iters,
                     restarts=restart, converged=converged, best_history=history,
                     allow_local=opts.allow_local)


# ---------------------------------------------------------------------------
# primal recovery

def solve_user_fixed_theta(h, g, alpha: float, lcoef: float, lmax: float, L: float,
                           B: float, T: float, mu_guess: float = 0.0):
    """Exact minimum energy of one user on a fixed set of subcarriers.

    Bisection on the user's rate multiplier mu: local bits and powers follow
    the closed forms at mu, and mu is the smallest value whose offloaded plus
    local bits cover L. Returns (mu, l, powers) or None if L is unreachable.
    """
    h = np.ascontiguousarray(h, dtype=float)
    g = np.ascontiguousarray(g, dtype=float)
    if L <= 0:
        return 0.0, 0.0, np.zeros(len(h))
    if lmax < L:
        useful = h > g
        if not (useful & (g == 0)).any():
            cap = lmax + T * B * float(np.sum(np.log2(h[useful] / g[useful])))
            if cap <= L:
                return None

    def local(mu):
        return min(math.sqrt(mu / (3.0 * alpha * lcoef)), lmax)

    def resid(mu):
        return local(mu) + T * kernels.user_response_core(mu, h, g, alpha, B)[0] - L

    if mu_guess > 0:
        hi = mu_guess
    elif lmax > 0:
        hi = 3.0 * alpha * lcoef * min(L, lmax) ** 2
    else:
        gap = float(np.max(h - g)) if len(h) else 0.0
        hi = alpha * LN2 / (B * gap) if gap > 0 else 1.0
    lo = 0.0
    if resid(hi) >= 0:
        while hi > 0:
            mid = hi / 2
            if resid(mid) < 0:
                lo = mid
                break
            hi = mid
    else:
        while True:
            lo = hi
            hi *= 2
            if not math.isfinite(hi):
                return None
            if resid(hi) >= 0:
                break
    for _ in range(200):
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
        mid = 0.5 * (lo + hi)
        if resid(mid) >= 0:
            hi = mid
        else:
            lo = mid
    rate, p = kernels.user_response_core(hi, h, g, alpha, B)
    l = local(hi)
    if l + T * rate < L:
        # sub-ulp shortfall from rounding; cover it locally when possible
        l = min(lmax, L - T * rate)
    return hi, l, p


def recover_primal(dual_state: DualState, channels: ChannelSet,
                   users: Sequence[UserProfile], cfg: SystemConfig,
                   opts: Optional[SolverOptions] = None) -> SolveReport:
    opts = opts or SolverOptions(allow_local=dual_state.allow_local)
    allow_local = dual_state.allow_local
    h, g, alpha, lcoef, lmax, L = _arrays(channels, users, cfg, allow_local)
    B, T = cfg.bandwidth_hz, cfg.block_time_s
    K, N = h.shape
    lam = dual_state.best_lambda
    _, cand = dual_eval(lam, channels, users, cfg, allow_local)
    status = Status.OPTIMAL if dual_state.converged else Status.MAX_ITERATIONS

    dual = dual_state.best_dual_j
    if opts.repair:
        local_bits = np.zeros(K)
        power = np.zeros((K, N))
        mu = np.zeros(K)
        for k in range(K):
            owned = np.flatnonzero(cand.owner == k)
            sol = solve_user_fixed_theta(h[k, owned], g[k, owned], alpha[k], lcoef[k],
                                         lmax[k], L[k], B, T, mu_guess=lam[k])
            if sol is None:
                status = Status.INFEASIBLE
                local_bits[k] = min(L[k], lmax[k])
                continue
            mu[k], local_bits[k], power[k, owned] = sol
        alloc = Allocation(local_bits, cand.owner.copy(), power)
        if status is not Status.INFEASIBLE:
            # the repair multipliers are dual feasible too; when they reproduce
            # the fixed assignment they certify a zero gap
            dual = max(dual, dual_eval(mu, channels, users, cfg, allow_local)[0])
    else:
        alloc = cand

    primal = total_weighted_energy(alloc, users, cfg)
    if status is not Status.INFEASIBLE and not opts.repair:
        if not check_constraints(alloc, users, channels, cfg).feasible:
            status = Status.INFEASIBLE
    # weak duality: a negative gap can only be rounding
    gap = max((primal - dual) / primal, 0.0) if primal > 0 else 0.0
    return SolveReport(allocation=alloc, primal_energy_j=primal, dual_bound_j=dual,
                       relative_gap=gap, iterations=dual_state.iterations, status=status,
                       dual_lambda=lam.copy())


def infeasible_report(channels: ChannelSet, users: Sequence[UserProfile]) -> SolveReport:
    K, N = channels.h.shape
    return SolveReport(Allocation.zeros(K, N), math.inf, math.inf, math.nan, 0,
                       Status.INFEASIBLE, np.zeros(K))


def solve(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
          opts: Optional[SolverOptions] = None) -> SolveReport:
    """Dual ascent followed by primal recovery, with a capacity pre-check."""
    opts = opts or SolverOptions()
    for k, u in enumerate(users):
        bound = per_user_capacity_bound(k, channels, users, cfg)
        if not opts.allow_local:
            bound -= max_local_bits(u, cfg)
        if bound < u.task_bits:
            return infeasible_report(channels, users)
    state = solve_dual(channels, users, cfg, opts)
    return recover_primal(state, channels, users, cfg, opts)
