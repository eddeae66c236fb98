"""Quick invariant checks runnable without pytest (``secoff selftest``)."""

from __future__ import annotations

import math
from typing import Callable, List, Tuple

import numpy as np

from .benchmarks import SchemeId, run_scheme
from .model import Status, SystemConfig, UserProfile, check_constraints
from .oracle import brute_force_solve, golden_section_psi_min
from .simkit import ExperimentConfig, Sweep, generate_channels
from .solver import dual_eval, optimal_power, psi, solve, subgradient

Check = Callable[[np.random.Generator], Tuple[bool, str]]


def _power_vs_golden(rng):
    worst = 0.0
    for _ in range(200):
        g = rng.uniform(0, 5)
        h = g + rng.uniform(1e-3, 5)
        lam, alpha, B, T = rng.uniform(0.1, 5), rng.uniform(0.1, 2), rng.uniform(0.5, 2), rng.uniform(0.1, 2)
        p = optimal_power(lam, h, g, alpha, B)
        q = golden_section_psi_min(lam, h, g, alpha, B, T)
        worst = max(worst, abs(p - q) / (1 + p))
        if psi(p, lam, h, g, alpha, B, T) > psi(q, lam, h, g, alpha, B, T) + 1e-9:
            return False, "closed form beaten by golden section"
    return worst <= 1e-6, f"max |p - p_gs|/(1+p) = {worst:.2e}"


def _water_filling(rng):
    worst = 0.0
    for _ in range(200):
        h, lam, alpha, B = rng.uniform(0.01, 10, size=4)
        ref = max(lam * B / (math.log(2) * alpha) - 1 / h, 0.0)
        worst = max(worst, abs(optimal_power(lam, h, 0.0, alpha, B) - ref))
    return worst <= 1e-12, f"max deviation {worst:.1e}"


def _instance(rng, K=2, N=4, L=3e5):
    users = [UserProfile(L) for _ in range(K)]
    cfg = SystemConfig(num_subcarriers=N)
    exp = ExperimentConfig(system=cfg, users=tuple(users), sweep=Sweep("TaskBits", (L,)),
                           num_seeds=1, base_seed=int(rng.integers(2 ** 32)))
    return generate_channels(exp, 0), users, cfg


def _subgradient_inequality(rng):
    ch, users, cfg = _instance(rng, K=4, N=64, L=5e5)
    for _ in range(20):
        lam = rng.uniform(0, 3e-7, size=4)
        lam2 = rng.uniform(0, 3e-7, size=4)
        f1, cand = dual_eval(lam, ch, users, cfg)
        s = subgradient(lam, cand, ch, users, cfg)
        f2, _ = dual_eval(lam2, ch, users, cfg)
        if f2 > f1 + s @ (lam2 - lam) + 1e-9:
            return False, "subgradient inequality violated"
    return True, "20 pairs"


def _oracle_sandwich(rng):
    for _ in range(3):
        ch, users, cfg = _instance(rng)
        rep = solve(ch, users, cfg)
        orc = brute_force_solve(ch, users, cfg)
        if rep.status is not Status.OPTIMAL or orc.status is not Status.OPTIMAL:
            continue
        if not (rep.dual_bound_j <= orc.energy_j + 1e-9 and orc.energy_j <= rep.primal_energy_j + 1e-9):
            return False, f"dual {rep.dual_bound_j:.6e} oracle {orc.energy_j:.6e} primal {rep.primal_energy_j:.6e}"
    return True, "3 instances"


def _dominance(rng):
    ch, users, cfg = _instance(rng, K=4, N=64, L=6e5)
    e = {s: run_scheme(s, ch, users, cfg) for s in SchemeId}
    for rep in e.values():
        if rep.status is Status.OPTIMAL and not check_constraints(
                rep.allocation, users, ch if rep is not e[SchemeId.NO_EAVESDROPPER]
                else ch.without_eavesdropper(), cfg).feasible:
            return False, "constraint violation"
    ne, pr = e[SchemeId.NO_EAVESDROPPER].primal_energy_j, e[SchemeId.PROPOSED].primal_energy_j
    cap = min(e[SchemeId.SECURE_FULL_OFFLOAD].primal_energy_j, e[SchemeId.LOCAL_ONLY].primal_energy_j)
    return (ne <= pr + 1e-9 and pr <= cap + 1e-9), f"{ne:.4e} <= {pr:.4e} <= {cap:.4e}"


CHECKS: List[Tuple[str, Check]] = [
    ("closed-form power vs golden section", _power_vs_golden),
    ("water-filling degeneration", _water_filling),
    ("subgradient inequality", _subgradient_inequality),
    ("oracle sandwich", _oracle_sandwich),
    ("scheme dominance and feasibility", _dominance),
]


def run(seed: int = 0, out=print) -> bool:
    rng = np.random.default_rng(seed)
    ok_all = True
    for name, check in CHECKS:
        ok, detail = check(rng)
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
