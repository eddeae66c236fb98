"""Comparison schemes, each a restriction or relaxation of the joint problem.

All of them go through the same dual solver: full offloading disables the
local-bits response, and the no-eavesdropper design zeroes the eavesdropper
gains before solving.
"""

from __future__ import annotations

import enum
import math
from typing import Optional, Sequence

import numpy as np

from .model import (
    Allocation,
    ChannelSet,
    SolveReport,
    Status,
    SystemConfig,
    UserProfile,
    local_energy,
    max_local_bits,
)
from .solver import SolverOptions, solve


class SchemeId(str, enum.Enum):
    PROPOSED = "Proposed"
    SECURE_FULL_OFFLOAD = "SecureFullOffload"
    LOCAL_ONLY = "LocalOnly"
    NO_EAVESDROPPER = "NoEavesdropper"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        for s in cls:
            if s.value.lower() == name.strip().lower():
                return s
        raise ValueError(f"unknown scheme {name!r}; expected one of "
                         + ", ".join(s.value for s in cls))


class InfeasibleError(ValueError):
    pass


def proposed(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
             opts: Optional[SolverOptions] = None) -> SolveReport:
    return solve(channels, users, cfg, opts)


def secure_full_offload(channels: ChannelSet, users: Sequence[UserProfile],
                        cfg: SystemConfig, opts: Optional[SolverOptions] = None) -> SolveReport:
    opts = opts or SolverOptions()
    restricted = SolverOptions(**{**vars(opts), "allow_local": False})
    return solve(channels, users, cfg, restricted)


def local_only(users: Sequence[UserProfile], cfg: SystemConfig) -> float:
    """Weighted energy of computing every task bit locally."""
    for k, u in enumerate(users):
        if u.task_bits > max_local_bits(u, cfg):
            raise InfeasibleError(f"user {k}: L_k = {u.task_bits:g} exceeds l_max")
    return float(sum(u.energy_weight * local_energy(u.task_bits, u, cfg) for u in users))


def local_only_report(users: Sequence[UserProfile], cfg: SystemConfig,
                      num_subcarriers: int) -> SolveReport:
    K = len(users)
    L = np.array([u.task_bits for u in users], dtype=float)
    alloc = Allocation(L, np.zeros(num_subcarriers, dtype=np.intp), np.zeros((K, num_subcarriers)))
    try:
        energy = local_only(users, cfg)
    except InfeasibleError:
        return SolveReport(alloc, math.inf, math.inf, math.nan, 0, Status.INFEASIBLE, np.zeros(K))
    return SolveReport(alloc, energy, energy, 0.0, 0, Status.OPTIMAL, np.zeros(K))


def no_eavesdropper(channels: ChannelSet, users: Sequence[UserProfile], cfg: SystemConfig,
                    opts: Optional[SolverOptions] = None) -> SolveReport:
    return solve(channels.without_eavesdropper(), users, cfg, opts)


def run_scheme(scheme: SchemeId, channels: ChannelSet, users: Sequence[UserProfile],
               cfg: SystemConfig, opts: Optional[SolverOptions] = None) -> SolveReport:
    scheme = SchemeId(scheme)
    if scheme is SchemeId.PROPOSED:
        return proposed(channels, users, cfg, opts)
    if scheme is SchemeId.SECURE_FULL_OFFLOAD:
        return secure_full_offload(channels, users, cfg, opts)
    if scheme is SchemeId.NO_EAVESDROPPER:
        return no_eavesdropper(channels, users, cfg, opts)
    return local_only_report(users, cfg, channels.num_subcarriers)
