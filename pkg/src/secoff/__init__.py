"""Energy-optimal secure multiuser multicarrier computation offloading."""

from .benchmarks import SchemeId, local_only, no_eavesdropper, proposed, run_scheme, secure_full_offload
from .kernels import BACKEND
from .model import (
    Allocation,
    ChannelSet,
    SolveReport,
    Status,
    SystemConfig,
    UserProfile,
    check_constraints,
    total_weighted_energy,
)
from .solver import SolverOptions, solve

__all__ = [
    "Allocation", "BACKEND", "ChannelSet", "SchemeId", "SolveReport", "SolverOptions", "Status",
    "SystemConfig", "UserProfile", "check_constraints", "local_only", "no_eavesdropper",
    "proposed", "run_scheme", "secure_full_offload", "solve", "total_weighted_energy",
]
