"""Shared instance builders for the test suite."""

import numpy as np

from secoff.model import SystemConfig, UserProfile
from secoff.simkit import ExperimentConfig, Sweep, generate_channels


def random_instance(seed, K=2, N=4, L=None, d_ap=20.0, d_eve=20.0, **sys_kw):
    """Channels drawn through the sweep generator at the default system scale.

    ``L`` may be a scalar, a length-K sequence or None (uniform in [1e5, 7e5]).
    """
    rng = np.random.default_rng(seed)
    if L is None:
        L = rng.uniform(1e5, 7e5, size=K)
    L = np.broadcast_to(np.asarray(L, dtype=float), (K,))
    users = tuple(UserProfile(float(b), energy_weight=1.0 / K, dist_ap_m=d_ap, dist_eve_m=d_eve)
                  for b in L)
    cfg = SystemConfig(num_subcarriers=N, **sys_kw)
    exp = ExperimentConfig(cfg, users, Sweep("TaskBits", (1.0,)), num_seeds=1,
                           base_seed=int(rng.integers(2 ** 32)))
    return generate_channels(exp, 0), users, cfg
