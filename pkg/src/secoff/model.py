"""System model: domain types, energies, worst-case secrecy rate and the
constraint checks of the weighted sum-energy minimization problem.

Channel gains are stored noise-normalized (gain / (N0 * B)), so the unit
receiver noise convention holds as a data invariant and powers are in Watts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import List, Sequence

import numpy as np

LN2 = float(np.log(2.0))


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class SystemConfig:
    block_time_s: float = 0.3
    bandwidth_hz: float = 0.3125e6
    num_subcarriers: int = 64
    noise_psd_dbm_hz: float = -105.0
    pathloss_ref_db: float = -30.0
    pathloss_ref_dist_m: float = 1.0
    pathloss_exponent: float = 3.7
    csi_error_fraction: float = 0.1

    def __post_init__(self):
        if not self.block_time_s > 0:
            raise ValueError("block_time_s must be > 0")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")
        if int(self.num_subcarriers) != self.num_subcarriers or self.num_subcarriers < 1:
            raise ValueError("num_subcarriers must be an integer >= 1")
        if not self.pathloss_exponent > 0:
            raise ValueError("pathloss_exponent must be > 0")
        if not self.pathloss_ref_dist_m > 0:
            raise ValueError("pathloss_ref_dist_m must be > 0")
        if not self.csi_error_fraction >= 0:
            raise ValueError("csi_error_fraction must be >= 0")

    @property
    def noise_power_w(self) -> float:
        """Noise power over one subcarrier, N0 * B, in Watts."""
        return 10.0 ** ((self.noise_psd_dbm_hz - 30.0) / 10.0) * self.bandwidth_hz


@dataclass(frozen=True)
class UserProfile:
    task_bits: float
    cycles_per_bit: float = 1e3
    cap_coeff_j_per_cycle: float = 1e-28
    max_cpu_hz: float = 1e10 / 3
    energy_weight: float = 0.25
    dist_ap_m: float = 20.0
    dist_eve_m: float = 20.0

    def __post_init__(self):
        # task_bits = 0 is allowed: a user with nothing to compute
        if not self.task_bits >= 0:
            raise ValueError("task_bits must be >= 0")
        for name in ("cycles_per_bit", "cap_coeff_j_per_cycle", "max_cpu_hz",
                     "energy_weight", "dist_ap_m", "dist_eve_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    def with_task_bits(self, bits: float) -> "UserProfile":
        return replace(self, task_bits=float(bits))


@dataclass(frozen=True)
class ChannelSet:
    """Noise-normalized channel power gains, each of shape (K, N)."""

    h: np.ndarray
    g_bar: np.ndarray
    eps: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        g_bar = np.array(self.g_bar, dtype=float)
        eps = np.broadcast_to(np.asarray(self.eps, dtype=float), h.shape).copy()
        if h.ndim != 2 or g_bar.shape != h.shape:
            raise ValueError("h and g_bar must be K x N matrices of equal shape")
        if (h < 0).any() or (g_bar < 0).any() or (eps < 0).any():
            raise ValueError("channel gains must be non-negative")
        for arr in (h, g_bar, eps):
            arr.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g_bar", g_bar)
        object.__setattr__(self, "eps", eps)

    @property
    def g(self) -> np.ndarray:
        """Worst-case eavesdropper gain g_bar + eps."""
        return self.g_bar + self.eps

    @property
    def num_users(self) -> int:
        return self.h.shape[0]

    @property
    def num_subcarriers(self) -> int:
        return self.h.shape[1]

    def without_eavesdropper(self) -> "ChannelSet":
        zeros = np.zeros_like(self.h)
        return ChannelSet(self.h, zeros, zeros)


@dataclass(frozen=True)
class Allocation:
    """Primal variables: local bits l (K,), subcarrier owners (N,), powers (K, N)."""

    local_bits: np.ndarray
    owner: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "local_bits", np.asarray(self.local_bits, dtype=float))
        object.__setattr__(self, "owner", np.asarray(self.owner, dtype=np.intp))
        object.__setattr__(self, "power", np.asarray(self.power, dtype=float))

    @classmethod
    def zeros(cls, num_users: int, num_subcarriers: int) -> "Allocation":
        return cls(np.zeros(num_users), np.zeros(num_subcarriers, dtype=np.intp),
                   np.zeros((num_users, num_subcarriers)))

    def theta(self) -> np.ndarray:
        """Binary K x N assignment matrix."""
        K = self.power.shape[0]
        return (self.owner[None, :] == np.arange(K)[:, None]).astype(float)


@dataclass
class SolveReport:
    allocation: Allocation
    primal_energy_j: float
    dual_bound_j: float
    relative_gap: float
    iterations: int
    status: Status
    dual_lambda: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def summary(self) -> str:
        lines = [
            f"status          : {self.status.value}",
            f"primal energy   : {self.primal_energy_j:.6e} J",
            f"dual bound      : {self.dual_bound_j:.6e} J",
            f"relative gap    : {self.relative_gap:.3e}",
            f"iterations      : {self.iterations}",
            "local bits      : " + ", ".join(f"{x:.4g}" for x in self.allocation.local_bits),
            "lambda*         : " + ", ".join(f"{x:.4g}" for x in self.dual_lambda),
        ]
        counts = np.bincount(self.allocation.owner, minlength=len(self.allocation.local_bits))
        lines.append("subcarriers/user: " + ", ".join(str(c) for c in counts))
        return "\n".join(lines)


def local_energy(l, u: UserProfile, cfg: SystemConfig):
    """Energy of computing ``l`` bits locally at equal CPU frequency over the block."""
    C = u.cycles_per_bit
    return u.cap_coeff_j_per_cycle * C ** 3 * np.power(l, 3) / cfg.block_time_s ** 2


def max_local_bits(u: UserProfile, cfg: SystemConfig) -> float:
    return u.max_cpu_hz * cfg.block_time_s / u.cycles_per_bit


def secrecy_terms(power_row, h_row, g_row) -> np.ndarray:
    """Per-subcarrier (log2(1+hp) - log2(1+gp))^+ in bits/s/Hz."""
    p = np.asarray(power_row, dtype=float)
    diff = (np.log1p(np.asarray(h_row) * p) - np.log1p(np.asarray(g_row) * p)) / LN2
    return np.maximum(diff, 0.0)


def secrecy_rate(owner_row, power_row, h_row, g_row, cfg: SystemConfig) -> float:
    """Worst-case secrecy rate in bits/s of one user.

    ``owner_row`` is the user's row of the assignment matrix (1 where the
    user owns the subcarrier).
    """
    theta = np.asarray(owner_row, dtype=float)
    return float(cfg.bandwidth_hz * np.sum(theta * secrecy_terms(power_row, h_row, g_row)))


def offload_energy(owner_row, power_row, cfg: SystemConfig) -> float:
    theta = np.asarray(owner_row, dtype=float)
    return float(cfg.block_time_s * np.sum(theta * np.asarray(power_row, dtype=float)))


def user_energies(a: Allocation, users: Sequence[UserProfile], cfg: SystemConfig):
    """Unweighted (local, offload) energy per user."""
    theta = a.theta()
    loc = np.array([local_energy(a.local_bits[k], u, cfg) for k, u in enumerate(users)])
    off = np.array([offload_energy(theta[k], a.power[k], cfg) for k in range(len(users))])
    return loc, off


def total_weighted_energy(a: Allocation, users: Sequence[UserProfile],
                          cfg: SystemConfig) -> float:
    loc, off = user_energies(a, users, cfg)
    alpha = np.array([u.energy_weight for u in users])
    return float(np.sum(alpha * (loc + off)))


@dataclass
class ConstraintReport:
    rate_residual_bits: np.ndarray     # T*R_k - (L_k - l_k), per user
    local_bits_violation: np.ndarray   # distance of l_k outside [0, l_max], per user
    negative_power: bool
    power_on_unowned: bool
    owner_valid: bool
    tol_bits: np.ndarray

    @property
    def rate_ok(self) -> np.ndarray:
        return self.rate_residual_bits >= -self.tol_bits

    @property
    def feasible(self) -> bool:
        return bool(self.rate_ok.all() and (self.local_bits_violation <= self.tol_bits).all()
                    and not self.negative_power and not self.power_on_unowned
                    and self.owner_valid)

    def violations(self) -> List[str]:
        out = []
        for k, ok in enumerate(self.rate_ok):
            if not ok:
                out.append(f"user {k}: rate residual {self.rate_residual_bits[k]:.6g} bits")
        for k, v in enumerate(self.local_bits_violation):
            if v > self.tol_bits[k]:
                out.append(f"user {k}: local bits outside [0, l_max] by {v:.6g}")
        if self.negative_power:
            out.append("negative transmit power")
        if self.power_on_unowned:
            out.append("power on a subcarrier the user does not own")
        if not self.owner_valid:
            out.append("subcarrier owner index out of range")
        return out


def check_constraints(a: Allocation, users: Sequence[UserProfile], channels: ChannelSet,
                      cfg: SystemConfig, tol: float = 1e-6) -> ConstraintReport:
    """Evaluate the rate, local-bit, power and assignment constraints.

    ``tol`` is relative: a rate residual down to ``-tol * L_k`` bits passes.
    """
    K = len(users)
    owner_valid = bool(a.owner.shape == (channels.num_subcarriers,)
                       and ((a.owner >= 0) & (a.owner < K)).all())
    theta = a.theta() if owner_valid else np.zeros_like(a.power)
    g = channels.g
    T = cfg.block_time_s
    L = np.array([u.task_bits for u in users])
    resid = np.empty(K)
    viol = np.empty(K)
    for k, u in enumerate(users):
        rate = secrecy_rate(theta[k], a.power[k], channels.h[k], g[k], cfg)
        resid[k] = T * rate - (L[k] - a.local_bits[k])
        lmax = max_local_bits(u, cfg)
        viol[k] = max(0.0, -a.local_bits[k], a.local_bits[k] - lmax)
    return ConstraintReport(
        rate_residual_bits=resid,
        local_bits_violation=viol,
        negative_power=bool((a.power < 0).any()),
        power_on_unowned=bool(((a.power != 0) & (theta == 0)).any()),
        owner_valid=owner_valid,
        tol_bits=tol * np.maximum(L, 1.0),
    )


def per_user_capacity_bound(k: int, channels: ChannelSet, users: Sequence[UserProfile],
                            cfg: SystemConfig) -> float:
    """Bits user ``k`` could process if it owned every subcarrier at unbounded power.

    A user whose task exceeds this bound is infeasible regardless of the others.
    """
    h = channels.h[k]
    g = channels.g[k]
    lmax = max_local_bits(users[k], cfg)
    useful = h > g
    if (useful & (g == 0)).any():
        return float("inf")
    sat = np.log2(h[useful] / g[useful]).sum()
    return float(lmax + cfg.block_time_s * cfg.bandwidth_hz * sat)
