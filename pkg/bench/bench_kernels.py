"""Compiled vs NumPy kernel timings.

    python bench/bench_kernels.py [--repeat 5]

Times the dual-function kernel on a K=4, N=64 instance and a full solve with
each backend swapped in. Exits with an error if the extension is not built.
"""

import argparse
import sys
import timeit
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from secoff import _kernels_py, kernels  # noqa: E402
from secoff.solver import _arrays, solve  # noqa: E402
from support import random_instance  # noqa: E402


def _use(impl):
    kernels.dual_eval_core = impl.dual_eval_core
    kernels.user_response_core = impl.user_response_core


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    try:
        from secoff import _kernels as compiled
    except ImportError:
        sys.exit("compiled extension not available; run `pip install -e . --no-build-isolation`")

    ch, users, cfg = random_instance(0, K=4, N=64)
    h, g, alpha, lcoef, lmax, L = _arrays(ch, users, cfg)
    h, g = np.ascontiguousarray(h), np.ascontiguousarray(g)
    lam = np.full(4, 2e-7)
    B, T = cfg.bandwidth_hz, cfg.block_time_s

    print(f"{'benchmark':<28}{'compiled':>12}{'python':>12}{'speedup':>10}")
    rows = []
    for name, impl in (("compiled", compiled), ("python", _kernels_py)):
        t = min(timeit.repeat(lambda: impl.dual_eval_core(lam, h, g, alpha, lcoef, lmax, L, B, T),
                              number=2000, repeat=args.repeat)) / 2000
        rows.append(t)
    print(f"{'dual_eval_core K=4 N=64':<28}{rows[0] * 1e6:>10.1f}us{rows[1] * 1e6:>10.1f}us"
          f"{rows[1] / rows[0]:>9.1f}x")

    rows = []
    for impl in (compiled, _kernels_py):
        _use(impl)
        t = min(timeit.repeat(lambda: solve(ch, users, cfg), number=20, repeat=args.repeat)) / 20
        rows.append(t)
    print(f"{'solve K=4 N=64':<28}{rows[0] * 1e3:>10.2f}ms{rows[1] * 1e3:>10.2f}ms"
          f"{rows[1] / rows[0]:>9.1f}x")


if __name__ == "__main__":
    main()
