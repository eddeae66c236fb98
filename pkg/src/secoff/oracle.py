"""Brute-force reference solver for small instances.

Enumerates every subcarrier ownership vector and solves each user's
fixed-assignment convex problem exactly, without any of the dual machinery.
Only feasible for K**N up to about a million.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .model import (
    Allocation,
    ChannelSet,
    Status,
    SystemConfig,
    UserProfile,
    local_energy,
    max_local_bits,
)
from .solver import optimal_local_bits, optimal_power, psi

ENUMERATION_LIMIT = 10 ** 6
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleOptions:
    bisection_tol: float = 1e-12
    power_grid_points: int = 1000

    def __post_init__(self):
        if not self.bisection_tol > 0:
            raise ValueError("bisection_tol must be > 0")
        if self.power_grid_points < 100:
            raise ValueError("power_grid_points must be >= 100")


@dataclass
class FixedThetaResult:
    local_bits: float
    powers: np.ndarray
    energy_j: float


@dataclass
class OracleResult:
    allocation: Optional[Allocation]
    energy_j: float
    status: Status


def golden_section_psi_min(lambda_k, h, g, alpha_k, B, T, bracket_hi=None, tol=1e-8):
    """Minimize psi over [0, bracket_hi] by golden-section search.

    psi is convex on [0, inf) when h > g, so it is unimodal on any bracket.
    The default bracket is ten times the closed-form minimizer plus one.
    """
    if not h > g:
        raise ValueError("golden-section search needs h > g")
    if bracket_hi is None:
        bracket_hi = 10.0 * optimal_power(lambda_k, h, g, alpha_k, B) + 1.0

    def f(p):
        return psi(p, lambda_k, h, g, alpha_k, B, T)

    a, b = 0.0, float(bracket_hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * (1.0 + abs(c)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    best = min((a, b, 0.5 * (a + b)), key=f)
    return best


def _saturation_bits(h, g, T, B):
    useful = h > g
    if (useful & (g == 0)).any():
        return math.inf
    return T * B * float(np.sum(np.log2(h[useful] / g[useful])))


def per_user_fixed_theta(k: int, owned, channels: ChannelSet, users: Sequence[UserProfile],
                         cfg: SystemConfig, opts: OracleOptions = OracleOptions()):
    """Exact minimum of user ``k``'s weighted energy over the given subcarriers.

    Returns a FixedThetaResult, or Status.INFEASIBLE when even unbounded power
    on every owned subcarrier plus full local computing cannot cover L_k.
    """
    u = users[k]
    owned = np.asarray(owned, dtype=np.intp)
    h = channels.h[k, owned]
    g = channels.g[k, owned]
    T, B = cfg.block_time_s, cfg.bandwidth_hz
    L = u.task_bits
    lmax = max_local_bits(u, cfg)
    if L <= 0:
        return FixedThetaResult(0.0, np.zeros(len(owned)), 0.0)
    if lmax + _saturation_bits(h, g, T, B) < L:
        return Status.INFEASIBLE
    if lmax + _saturation_bits(h, g, T, B) == L and lmax < L:
        return Status.INFEASIBLE

    alpha = u.energy_weight
    hs = [float(x) for x in h]
    gs = [float(x) for x in g]

    def powers(mu):
        return [optimal_power(mu, hn, gn, alpha, B) for hn, gn in zip(hs, gs)]

    def resid(log_mu):
        mu = math.exp(log_mu)
        bits = sum(math.log2((1.0 + hn * p) / (1.0 + gn * p))
                   for hn, gn, p in zip(hs, gs, powers(mu)))
        return optimal_local_bits(mu, u, cfg) + T * B * bits - L

    # the multiplier spans many decades, so search over log(mu)
    lo, hi = math.log(1e-30), math.log(1e-29)
    while resid(hi) < 0:
        lo, hi = hi, hi + math.log(10.0)
        if hi > math.log(1e300):
            return Status.INFEASIBLE
    if resid(lo) < 0:
        hi = brentq(resid, lo, hi, xtol=opts.bisection_tol, rtol=4 * np.finfo(float).eps)
    step = 1e-15
    while resid(hi) < 0:
        # nudge onto the feasible side of the root
        hi += step
        step *= 2
    mu = math.exp(hi)
    l = optimal_local_bits(mu, u, cfg)
    p = np.array(powers(mu))
    energy = u.energy_weight * (float(local_energy(l, u, cfg)) + T * float(np.sum(p)))
    return FixedThetaResult(l, p, energy)


def brute_force_solve(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
                      opts: OracleOptions = OracleOptions()) -> OracleResult:
    """Global optimum over all K**N ownership vectors (lexicographically first on ties)."""
    K, N = channels.h.shape
    if K ** N > ENUMERATION_LIMIT:
        raise ValueError(f"K**N = {K ** N} exceeds the enumeration limit {ENUMERATION_LIMIT}")

    cache: Dict[Tuple[int, Tuple[int, ...]], object] = {}

    def user_cost(k, owned):
        key = (k, owned)
        if key not in cache:
            cache[key] = per_user_fixed_theta(k, list(owned), channels, users, cfg, opts)
        return cache[key]

    best_energy = math.inf
    best_owner = None
    for owner in itertools.product(range(K), repeat=N):
        total = 0.0
        for k in range(K):
            res = user_cost(k, tuple(n for n in range(N) if owner[n] == k))
            if res is Status.INFEASIBLE:
                total = math.inf
                break
            total += res.energy_j
        if total < best_energy:
            best_energy = total
            best_owner = owner

    if best_owner is None:
        return OracleResult(None, math.inf, Status.INFEASIBLE)
    local_bits = np.zeros(K)
    power = np.zeros((K, N))
    for k in range(K):
        owned = tuple(n for n in range(N) if best_owner[n] == k)
        res = user_cost(k, owned)
        local_bits[k] = res.local_bits
        power[k, list(owned)] = res.powers
    alloc = Allocation(local_bits, np.array(best_owner), power)
    return OracleResult(alloc, best_energy, Status.OPTIMAL)
