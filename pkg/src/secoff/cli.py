"""Command-line entry point: ``secoff {solve,sweep,oracle-check,selftest}``.

Exit codes: 0 success, 1 infeasible instance or failed check, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from . import kernels, selftest
from .benchmarks import SchemeId, run_scheme
from .model import Status, SystemConfig, UserProfile
from .oracle import brute_force_solve
from .simkit import (
    ConfigError,
    ExperimentConfig,
    Sweep,
    average_energy,
    default_config,
    generate_channels,
    load_config,
    run_sweep,
    write_csv,
)
from .solver import solve

EXIT_OK, EXIT_INFEASIBLE, EXIT_BAD_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _schemes(text: str) -> List[SchemeId]:
    try:
        return [SchemeId.parse(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="secoff", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="experiment JSON (default: shipped fig1 preset)")
        sp.add_argument("--seed", type=int, help="override base_seed")
        sp.add_argument("--scheme", type=_schemes, help="comma-separated scheme names")

    sp = sub.add_parser("solve", help="solve one instance and print the report")
    common(sp)
    sp.add_argument("--index", type=int, default=0, help="Monte-Carlo seed index of the channel draw")

    sp = sub.add_parser("sweep", help="run the Monte-Carlo sweep and write a CSV")
    common(sp)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--seeds", type=int, help="override num_seeds")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    sp = sub.add_parser("oracle-check", help="compare the dual solver with brute force")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--seeds", type=int, default=10, help="number of random instances")
    sp.add_argument("--users", type=int, default=2)
    sp.add_argument("--subcarriers", type=int, default=4)

    sp = sub.add_parser("selftest", help="run the invariant checks")
    sp.add_argument("--seed", type=int, default=0)
    return p


def _load(args) -> ExperimentConfig:
    exp = load_config(args.config) if args.config else default_config("fig1")
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["base_seed"] = args.seed
    if getattr(args, "seeds", None) is not None:
        updates["num_seeds"] = args.seeds
    if getattr(args, "scheme", None):
        updates["schemes"] = tuple(args.scheme)
    try:
        return replace(exp, **updates) if updates else exp
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _cmd_solve(args) -> int:
    exp = _load(args)
    schemes = args.scheme or [SchemeId.PROPOSED]
    channels = generate_channels(exp, args.index)
    code = EXIT_OK
    for scheme in schemes:
        rep = run_scheme(scheme, channels, exp.users, exp.system)
        print(f"== {scheme.value} ==")
        print(rep.summary())
        if rep.status is Status.INFEASIBLE:
            code = EXIT_INFEASIBLE
    return code


def _cmd_sweep(args) -> int:
    exp = _load(args)
    rows = run_sweep(exp, jobs=max(1, args.jobs))
    write_csv(rows, args.out)
    means = average_energy(rows)
    print(f"{len(rows)} rows -> {args.out} (kernels: {kernels.BACKEND})")
    for scheme in exp.schemes:
        cells = "  ".join(f"{v:g}:{means[(scheme, v)]:.4e}" if (scheme, v) in means else f"{v:g}:n/a"
                          for v in exp.sweep.values)
        print(f"{scheme.value:>18}  {cells}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    cfg = SystemConfig(num_subcarriers=args.subcarriers)
    bad = 0
    for i in range(args.seeds):
        L = float(rng.uniform(1e5, 7e5))
        users = tuple(UserProfile(L, energy_weight=1.0 / args.users) for _ in range(args.users))
        exp = ExperimentConfig(system=cfg, users=users, sweep=Sweep("TaskBits", (L,)),
                               num_seeds=1, base_seed=int(rng.integers(2 ** 32)))
        ch = generate_channels(exp, 0)
        rep = solve(ch, users, cfg)
        orc = brute_force_solve(ch, users, cfg)
        if orc.status is Status.INFEASIBLE:
            print(f"[{i}] infeasible instance, skipped")
            continue
        ok = rep.dual_bound_j <= orc.energy_j + 1e-9 <= rep.primal_energy_j + 2e-9
        bad += not ok
        print(f"[{i}] {'ok  ' if ok else 'FAIL'} dual {rep.dual_bound_j:.6e} <= oracle "
              f"{orc.energy_j:.6e} <= primal {rep.primal_energy_j:.6e}  "
              f"(primal/oracle {rep.primal_energy_j / orc.energy_j:.4f})")
    return EXIT_OK if bad == 0 else EXIT_INFEASIBLE


def _cmd_selftest(args) -> int:
    return EXIT_OK if selftest.run(args.seed) else EXIT_INFEASIBLE


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"solve": _cmd_solve, "sweep": _cmd_sweep,
                "oracle-check": _cmd_oracle_check, "selftest": _cmd_selftest}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
