"""Channel generation, seeded Monte-Carlo sweeps, JSON configs and CSV output."""

from __future__ import annotations

import csv
import enum
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .benchmarks import SchemeId, run_scheme
from .model import ChannelSet, Status, SystemConfig, UserProfile
from .solver import SolverOptions

CSV_HEADER = ["scheme", "sweep_kind", "sweep_value", "seed", "avg_energy_j", "status"]

# SeedSequence spawn-key stream ids
_AP_STREAM = 0
_EVE_STREAM = 1


class SweepKind(str, enum.Enum):
    TASK_BITS = "TaskBits"
    EVE_DISTANCE = "EveDistance"


@dataclass(frozen=True)
class Sweep:
    kind: SweepKind
    values: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", SweepKind(self.kind))
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("sweep values must not be empty")
        if any(v <= 0 for v in vals):
            raise ValueError("sweep values must be positive")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig
    users: Tuple[UserProfile, ...]
    sweep: Sweep
    num_seeds: int = 100
    base_seed: int = 2018
    schemes: Tuple[SchemeId, ...] = tuple(SchemeId)

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "schemes", tuple(SchemeId(s) for s in self.schemes))
        if not self.users:
            raise ValueError("at least one user is required")
        if int(self.num_seeds) != self.num_seeds or self.num_seeds < 1:
            raise ValueError("num_seeds must be an integer >= 1")
        if not 0 <= int(self.base_seed) < 2 ** 64:
            raise ValueError("base_seed must be a 64-bit unsigned integer")
        if not self.schemes:
            raise ValueError("at least one scheme is required")

    def users_at(self, sweep_value: float) -> Tuple[UserProfile, ...]:
        """User profiles with the swept quantity set to ``sweep_value``."""
        if self.sweep.kind is SweepKind.TASK_BITS:
            return tuple(replace(u, task_bits=sweep_value) for u in self.users)
        return tuple(replace(u, dist_eve_m=sweep_value) for u in self.users)


@dataclass(frozen=True)
class ResultRow:
    scheme: SchemeId
    sweep_kind: SweepKind
    sweep_value: float
    seed: int
    avg_energy_j: float
    status: Status

    def sort_key(self):
        return (self.scheme.value, self.sweep_value, self.seed)


# ---------------------------------------------------------------------------
# channels

def pathloss_gain(d_m: float, cfg: SystemConfig) -> float:
    """Average power gain beta0 * (d / d0)^(-xi), linear scale."""
    if not d_m > 0:
        raise ValueError("distance must be positive")
    return 10.0 ** (cfg.pathloss_ref_db / 10.0) * (d_m / cfg.pathloss_ref_dist_m) ** (
        -cfg.pathloss_exponent)


def _fading(base_seed: int, seed: int, stream: int, shape) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(seed), stream))
    return np.random.default_rng(ss).exponential(1.0, size=shape)


def generate_channels(exp: ExperimentConfig, seed: int,
                      users: Optional[Sequence[UserProfile]] = None) -> ChannelSet:
    """Rayleigh-faded, noise-normalized channels for one Monte-Carlo seed.

    Fading is unit-mean exponential power, drawn from independent streams for
    the AP and eavesdropper links keyed by (base_seed, seed). Distances only
    scale the draws, so changing the eavesdropper distance leaves the AP links
    and the eavesdropper fading pattern untouched.
    """
    users = exp.users if users is None else users
    cfg = exp.system
    K, N = len(users), cfg.num_subcarriers
    noise = cfg.noise_power_w
    ap_gain = np.array([pathloss_gain(u.dist_ap_m, cfg) for u in users])[:, None] / noise
    eve_gain = np.array([pathloss_gain(u.dist_eve_m, cfg) for u in users])[:, None] / noise
    h = ap_gain * _fading(exp.base_seed, seed, _AP_STREAM, (K, N))
    g_bar = eve_gain * _fading(exp.base_seed, seed, _EVE_STREAM, (K, N))
    eps = np.broadcast_to(cfg.csi_error_fraction * eve_gain, (K, N))
    return ChannelSet(h, g_bar, eps)


# ---------------------------------------------------------------------------
# sweeps

def _run_seed(exp: ExperimentConfig, seed: int, opts: Optional[SolverOptions]) -> List[ResultRow]:
    rows = []
    for value in exp.sweep.values:
        users = exp.users_at(value)
        channels = generate_channels(exp, seed, users)
        for scheme in exp.schemes:
            rep = run_scheme(scheme, channels, users, exp.system, opts)
            rows.append(ResultRow(scheme, exp.sweep.kind, value, seed,
                                  rep.primal_energy_j, rep.status))
    return rows


def run_sweep(exp: ExperimentConfig, opts: Optional[SolverOptions] = None,
              jobs: int = 1) -> List[ResultRow]:
    """Solve every (sweep value, seed, scheme) cell; rows come back sorted."""
    seeds = range(exp.num_seeds)
    rows: List[ResultRow] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_seed, [exp] * exp.num_seeds, seeds,
                                 [opts] * exp.num_seeds):
                rows.extend(part)
    else:
        for seed in seeds:
            rows.extend(_run_seed(exp, seed, opts))
    rows.sort(key=ResultRow.sort_key)
    return rows


def average_energy(rows: Iterable[ResultRow]) -> Dict[Tuple[SchemeId, float], float]:
    """Seed-averaged energy per (scheme, sweep value) over Optimal rows only."""
    acc: Dict[Tuple[SchemeId, float], List[float]] = {}
    for r in rows:
        if r.status is Status.OPTIMAL:
            acc.setdefault((r.scheme, r.sweep_value), []).append(r.avg_energy_j)
    return {key: float(np.mean(v)) for key, v in acc.items()}


# ---------------------------------------------------------------------------
# CSV

def write_csv(rows: Sequence[ResultRow], path) -> Path:
    path = Path(path)
    ordered = sorted(rows, key=ResultRow.sort_key)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in ordered:
                w.writerow([r.scheme.value, r.sweep_kind.value, repr(float(r.sweep_value)),
                            r.seed, repr(float(r.avg_energy_j)), r.status.value])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_csv(path) -> List[ResultRow]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        return [ResultRow(SchemeId(s), SweepKind(kind), float(v), int(seed), float(e), Status(st))
                for s, kind, v, seed, e, st in reader]


# ---------------------------------------------------------------------------
# JSON configs

class ConfigError(ValueError):
    """Malformed experiment config; the message names the file and field."""


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: dict, source: str = "<config>") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    required = ("system", "users", "sweep")
    for key in required:
        if key not in data:
            raise ConfigError(f"{source}: missing field '{key}'")
    unknown = sorted(set(data) - {f.name for f in fields(ExperimentConfig)})
    if unknown:
        raise ConfigError(f"{source}: unknown field(s) {', '.join(unknown)}")
    system = _build(SystemConfig, data["system"], f"{source}: system")
    if not isinstance(data["users"], list):
        raise ConfigError(f"{source}: users must be a list")
    users = [_build(UserProfile, u, f"{source}: users[{i}]") for i, u in enumerate(data["users"])]
    sweep = _build(Sweep, data["sweep"], f"{source}: sweep")
    rest = {k: v for k, v in data.items() if k not in required}
    if "schemes" in rest:
        try:
            rest["schemes"] = tuple(SchemeId.parse(s) for s in rest["schemes"])
        except (ValueError, AttributeError, TypeError) as exc:
            raise ConfigError(f"{source}: schemes: {exc}") from None
    try:
        return ExperimentConfig(system=system, users=tuple(users), sweep=sweep, **rest)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data, str(path))


def config_to_dict(exp: ExperimentConfig) -> dict:
    return {
        "system": asdict(exp.system),
        "users": [asdict(u) for u in exp.users],
        "sweep": {"kind": exp.sweep.kind.value, "values": list(exp.sweep.values)},
        "num_seeds": exp.num_seeds,
        "base_seed": exp.base_seed,
        "schemes": [s.value for s in exp.schemes],
    }


def default_config(name: str = "fig1") -> ExperimentConfig:
    """One of the shipped presets, ``fig1`` (task-size sweep) or ``fig2`` (distance sweep)."""
    ref = resources.files("secoff") / "configs" / f"{name}.json"
    data = json.loads(ref.read_text())
    return config_from_dict(data, f"{name}.json")
