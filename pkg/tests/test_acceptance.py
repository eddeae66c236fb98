"""Acceptance criteria, one test per criterion.

Every test appends a PASS/FAIL line to ``RESULTS``; conftest prints them in
the terminal summary. Run ``python tests/test_acceptance.py`` for the lines
alone.
"""

import math
import time

import numpy as np
import pytest

from secoff.benchmarks import SchemeId, run_scheme
from secoff.model import Status, check_constraints
from secoff.oracle import brute_force_solve, golden_section_psi_min
from secoff.simkit import (
    average_energy,
    default_config,
    generate_channels,
    run_sweep,
    write_csv,
)
from secoff.solver import dual_eval, optimal_power, psi, solve, subgradient
from support import random_instance

RESULTS = []

P, S, L_, N_ = (SchemeId.PROPOSED, SchemeId.SECURE_FULL_OFFLOAD, SchemeId.LOCAL_ONLY,
                SchemeId.NO_EAVESDROPPER)


def record(tag, ok, detail):
    RESULTS.append(f"{'PASS' if ok else 'FAIL'}  [{tag}] {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def fig1_rows():
    t0 = time.perf_counter()
    rows = run_sweep(default_config("fig1"))
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def fig2_rows():
    t0 = time.perf_counter()
    rows = run_sweep(default_config("fig2"))
    return rows, time.perf_counter() - t0


def _power_draws(n, seed):
    rng = np.random.default_rng(seed)
    lam = 10 ** rng.uniform(-2, 2, n)
    h = 10 ** rng.uniform(-2, 2, n)
    g = h * rng.uniform(0, 1, n)
    alpha = rng.uniform(0.05, 1.0, n)
    B = 10 ** rng.uniform(-1, 1, n)
    T = rng.uniform(0.1, 2.0, n)
    return lam, h, g, alpha, B, T


def test_closed_form_power_optimality():
    t0 = time.perf_counter()
    worst_dp, worst_psi = 0.0, -math.inf
    for lam, h, g, alpha, B, T in zip(*_power_draws(1000, 1)):
        args = tuple(float(v) for v in (lam, h, g, alpha, B))
        p = optimal_power(*args)
        q = golden_section_psi_min(*args, float(T))
        worst_dp = max(worst_dp, abs(p - q) / (1 + p))
        worst_psi = max(worst_psi, psi(p, *args, T) - psi(q, *args, T))
    dt = time.perf_counter() - t0
    ok = worst_dp <= 1e-6 and worst_psi <= 1e-9 and dt < 5
    record("power", ok, f"closed-form power optimality: max |dp|/(1+p) {worst_dp:.2e}, "
                        f"max psi excess {worst_psi:.2e}, {dt:.2f} s")


def test_water_filling_degeneration():
    lam, h, _, alpha, B, _ = _power_draws(1000, 2)
    worst = 0.0
    for a, b, c, d in zip(lam, h, alpha, B):
        ref = max(a * d / (math.log(2) * c) - 1.0 / b, 0.0)
        worst = max(worst, abs(optimal_power(float(a), float(b), 0.0, float(c), float(d)) - ref))
    record("water", worst <= 1e-12, f"water-filling degeneration: max deviation {worst:.1e}")


def test_oracle_sandwich_and_gap_trend():
    t0 = time.perf_counter()
    bad, ratio, gaps = [], [], {4: [], 8: []}
    for seed in range(20):
        for N in (4, 8):
            ch, users, cfg = random_instance(seed, K=2, N=N)
            rep = solve(ch, users, cfg)
            gaps[N].append(rep.relative_gap)
            if N == 8:
                continue
            orc = brute_force_solve(ch, users, cfg)
            ratio.append(rep.primal_energy_j / orc.energy_j)
            if not (rep.dual_bound_j <= orc.energy_j + 1e-9 and ratio[-1] <= 1.10):
                bad.append(seed)
    dt = time.perf_counter() - t0
    med4, med8 = float(np.median(gaps[4])), float(np.median(gaps[8]))
    RESULTS.append(f"{'PASS' if not bad else 'FAIL'}  [sandwich] dual <= oracle + 1e-9 and "
                   f"primal <= 1.10 x oracle on 20 K=2 N=4 instances (max primal/oracle "
                   f"{max(ratio):.6f}, failures {bad})")
    ok = not bad and med8 < med4 and dt < 60
    record("gap", ok, f"median relative gap N=8 {med8:.3e} strictly below N=4 {med4:.3e} "
                      f"(gaps above 1e-9: N=4 {sum(x > 1e-9 for x in gaps[4])}/20, "
                      f"N=8 {sum(x > 1e-9 for x in gaps[8])}/20), {dt:.1f} s")


def test_subgradient_inequality():
    t0 = time.perf_counter()
    ch, users, cfg = random_instance(4, K=4, N=64)
    rng = np.random.default_rng(4)
    worst = -math.inf
    for i in range(100):
        lam, lam2 = rng.uniform(0, 1e-6, (2, 4))
        if i % 2:
            # nearby pair, where the linear bound is close to tight
            lam2 = np.maximum(lam * (1 + 0.01 * rng.standard_normal(4)), 0.0)
        f1, cand = dual_eval(lam, ch, users, cfg)
        s = subgradient(lam, cand, ch, users, cfg)
        f2, _ = dual_eval(lam2, ch, users, cfg)
        worst = max(worst, f2 - (f1 + s @ (lam2 - lam)))
    dt = time.perf_counter() - t0
    record("subgrad", worst <= 1e-9 and dt < 10,
           f"dual concavity and subgradient validity: max violation {worst:.2e}, {dt:.2f} s")


def test_dominance_chain(fig1_rows):
    rows, dt = fig1_rows
    cells = {}
    for r in rows:
        cells[(r.scheme, r.sweep_value, r.seed)] = r
    worst, checked = -math.inf, 0
    for (scheme, v, seed), r in cells.items():
        if scheme is not P:
            continue
        ne, pr = cells[(N_, v, seed)], r
        caps = [cells[(s, v, seed)].avg_energy_j for s in (S, L_)
                if cells[(s, v, seed)].status is Status.OPTIMAL]
        if pr.status is not Status.OPTIMAL or ne.status is not Status.OPTIMAL:
            worst = math.inf
            continue
        checked += 1
        worst = max(worst, ne.avg_energy_j - pr.avg_energy_j,
                    *(pr.avg_energy_j - c for c in caps))
    mean = average_energy(rows)
    lo, hi = 1e5, 7e5
    near = max(abs(mean[(P, lo)] / mean[(L_, lo)] - 1), abs(mean[(P, lo)] / mean[(N_, lo)] - 1))
    ok_a = worst <= 1e-9
    ok_b = near <= 0.05
    ok_c = mean[(N_, hi)] < mean[(P, hi)] < min(mean[(S, hi)], mean[(L_, hi)])
    RESULTS.append(f"{'PASS' if ok_a else 'FAIL'}  [dominance-a] NoEavesdropper <= Proposed <= "
                   f"min(SecureFullOffload, LocalOnly) on {checked} instances, worst excess {worst:.1e}")
    RESULTS.append(f"{'PASS' if ok_b else 'FAIL'}  [dominance-b] L=1e5: Proposed within "
                   f"{near:.2%} of LocalOnly and NoEavesdropper")
    RESULTS.append(f"{'PASS' if ok_c else 'FAIL'}  [dominance-c] L=7e5: NoEavesdropper "
                   f"{mean[(N_, hi)]:.4e} < Proposed {mean[(P, hi)]:.4e} < min(SFO "
                   f"{mean[(S, hi)]:.4e}, LocalOnly {mean[(L_, hi)]:.4e})")
    record("dominance", ok_a and ok_b and ok_c and dt < 120,
           f"dominance chain over the task-size sweep, {dt:.1f} s")


def test_eavesdropper_distance_trend(fig2_rows):
    rows, dt = fig2_rows
    mean = average_energy(rows)
    values = sorted({r.sweep_value for r in rows})
    series = [mean[(P, v)] for v in values]
    monotone = all(b <= a for a, b in zip(series, series[1:]))
    far = mean[(P, 40.0)] / mean[(N_, 40.0)] - 1
    ok = monotone and 0 <= far <= 0.05 and dt < 120
    record("distance", ok, "Proposed vs eavesdropper distance "
           + " ".join(f"{v:g}m:{e:.4e}" for v, e in zip(values, series))
           + f"; at 40 m {far:.2%} above NoEavesdropper, {dt:.1f} s")


def test_constraint_satisfaction():
    worst_resid, worst_slack, reports = math.inf, 0.0, 0
    for exp_name, index_range in (("fig1", range(100)), ("fig2", range(100))):
        exp = default_config(exp_name)
        for v in (exp.sweep.values[0], exp.sweep.values[-1]):
            users = exp.users_at(v)
            for seed in index_range:
                ch = generate_channels(exp, seed, users)
                for scheme in (P, S, N_):
                    rep = run_scheme(scheme, ch, users, exp.system)
                    if rep.status is not Status.OPTIMAL:
                        continue
                    reports += 1
                    used = ch.without_eavesdropper() if scheme is N_ else ch
                    cr = check_constraints(rep.allocation, users, used, exp.system, tol=1e-6)
                    if not cr.feasible:
                        worst_resid = -math.inf
                    L = np.array([u.task_bits for u in users])
                    scaled = cr.rate_residual_bits / L
                    worst_resid = min(worst_resid, scaled.min())
                    active = rep.dual_lambda > 0
                    if active.any():
                        worst_slack = max(worst_slack, float(np.abs(scaled[active]).max()))
    ok = worst_resid >= -1e-6 and worst_slack <= 1e-4
    record("constraints", ok, f"constraint satisfaction on {reports} Optimal reports: min "
                              f"residual/L {worst_resid:.1e}, max slack/L with lambda*>0 "
                              f"{worst_slack:.1e}")


def test_determinism(fig1_rows, tmp_path):
    first = write_csv(fig1_rows[0], tmp_path / "a.csv").read_bytes()
    second = write_csv(run_sweep(default_config("fig1")), tmp_path / "b.csv").read_bytes()
    record("determinism", first == second,
           f"two full task-size sweeps give byte-identical CSV ({len(first)} bytes)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
