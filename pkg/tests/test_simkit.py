import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from secoff.benchmarks import SchemeId, local_only
from secoff.model import Status, SystemConfig, UserProfile
from secoff.simkit import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    ResultRow,
    Sweep,
    SweepKind,
    average_energy,
    config_from_dict,
    config_to_dict,
    default_config,
    generate_channels,
    load_config,
    pathloss_gain,
    read_csv,
    run_sweep,
    write_csv,
)

PATHLOSS_20M = 1.5352850326447372e-08   # -30 dB * 20^-3.7, evaluated once and frozen


def small_exp(kind="TaskBits", values=(2e5, 5e5), seeds=2, schemes=tuple(SchemeId), N=16):
    users = tuple(UserProfile(5e5) for _ in range(4))
    return ExperimentConfig(SystemConfig(num_subcarriers=N), users, Sweep(kind, values),
                            num_seeds=seeds, base_seed=77, schemes=schemes)


# -- pathloss and channels -----------------------------------------------------

def test_pathloss_reference_distance():
    assert pathloss_gain(1.0, SystemConfig()) == pytest.approx(1e-3, rel=1e-15)


def test_pathloss_twenty_meters():
    got = pathloss_gain(20.0, SystemConfig())
    assert got == pytest.approx(PATHLOSS_20M, rel=1e-14)
    assert got == pytest.approx(1.54e-8, rel=5e-3)


def test_pathloss_exponent_irrelevant_at_reference():
    assert pathloss_gain(1.0, SystemConfig(pathloss_exponent=1.85)) == pathloss_gain(1.0, SystemConfig())
    with pytest.raises(ValueError):
        pathloss_gain(0.0, SystemConfig())


def test_channels_deterministic():
    exp = small_exp()
    a, b = generate_channels(exp, 3), generate_channels(exp, 3)
    for x, y in ((a.h, b.h), (a.g_bar, b.g_bar), (a.eps, b.eps)):
        np.testing.assert_array_equal(x, y)
    assert not np.array_equal(a.h, generate_channels(exp, 4).h)
    assert not np.array_equal(a.h, generate_channels(replace(exp, base_seed=78), 3).h)


def test_channel_mean_matches_pathloss():
    cfg = SystemConfig(num_subcarriers=100_000)
    exp = ExperimentConfig(cfg, (UserProfile(1.0),), Sweep("TaskBits", (1.0,)), num_seeds=1)
    h = generate_channels(exp, 0).h
    target = pathloss_gain(20.0, cfg) / cfg.noise_power_w
    assert h.mean() == pytest.approx(target, rel=0.02)


def test_zero_csi_error():
    exp = small_exp()
    exp = replace(exp, system=replace(exp.system, csi_error_fraction=0.0))
    ch = generate_channels(exp, 0)
    assert not ch.eps.any()
    np.testing.assert_array_equal(ch.g, ch.g_bar)


def test_eve_distance_keeps_ap_links():
    exp = small_exp("EveDistance", (10.0, 30.0))
    near = generate_channels(exp, 1, exp.users_at(10.0))
    far = generate_channels(exp, 1, exp.users_at(30.0))
    np.testing.assert_array_equal(near.h, far.h)
    assert (far.g_bar < near.g_bar).all()


# -- sweeps ----------------------------------------------------------------------

def test_local_only_sweep_is_closed_form():
    exp = small_exp(seeds=1, schemes=(SchemeId.LOCAL_ONLY,))
    rows = run_sweep(exp)
    assert [r.sweep_value for r in rows] == list(exp.sweep.values)
    for r in rows:
        assert r.avg_energy_j == local_only(exp.users_at(r.sweep_value), exp.system)


def test_no_eavesdropper_constant_over_distance():
    exp = small_exp("EveDistance", (10.0, 20.0, 40.0), seeds=2,
                    schemes=(SchemeId.NO_EAVESDROPPER,))
    by_seed = {}
    for r in run_sweep(exp):
        by_seed.setdefault(r.seed, set()).add(r.avg_energy_j)
    assert all(len(v) == 1 for v in by_seed.values())


def test_rows_sorted_and_complete():
    exp = small_exp()
    rows = run_sweep(exp)
    assert len(rows) == len(exp.schemes) * len(exp.sweep.values) * exp.num_seeds
    assert rows == sorted(rows, key=ResultRow.sort_key)
    assert all(r.avg_energy_j >= 0 for r in rows if r.status is Status.OPTIMAL)


def test_parallel_matches_serial():
    exp = small_exp(seeds=3)
    assert run_sweep(exp) == run_sweep(exp, jobs=2)


def test_averaged_proposed_non_decreasing_in_task_size():
    exp = small_exp(values=(1e5, 3e5, 5e5, 7e5), seeds=4, schemes=(SchemeId.PROPOSED,))
    means = average_energy(run_sweep(exp))
    series = [means[(SchemeId.PROPOSED, v)] for v in exp.sweep.values]
    assert all(b >= a for a, b in zip(series, series[1:]))


def test_average_skips_non_optimal():
    rows = [ResultRow(SchemeId.PROPOSED, SweepKind.TASK_BITS, 1.0, 0, 2.0, Status.OPTIMAL),
            ResultRow(SchemeId.PROPOSED, SweepKind.TASK_BITS, 1.0, 1, float("inf"), Status.INFEASIBLE)]
    assert average_energy(rows) == {(SchemeId.PROPOSED, 1.0): 2.0}


# -- CSV --------------------------------------------------------------------------

def test_empty_csv_is_header_only(tmp_path):
    path = write_csv([], tmp_path / "e.csv")
    assert path.read_text() == ",".join(CSV_HEADER) + "\n"
    assert read_csv(path) == []


@given(st.lists(st.tuples(st.sampled_from(list(SchemeId)), st.floats(1e-3, 1e7),
                          st.integers(0, 1000), st.floats(0, 10), st.sampled_from(list(Status))),
                max_size=20))
def test_csv_round_trip(tmp_path_factory, data):
    rows = [ResultRow(s, SweepKind.TASK_BITS, v, seed, e, status) for s, v, seed, e, status in data]
    path = write_csv(rows, tmp_path_factory.mktemp("csv") / "r.csv")
    assert read_csv(path) == sorted(rows, key=ResultRow.sort_key)


def test_csv_byte_identical(tmp_path):
    exp = small_exp()
    a = write_csv(run_sweep(exp), tmp_path / "a.csv").read_bytes()
    b = write_csv(run_sweep(exp), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_csv_write_error_names_path(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="out.csv"):
        write_csv([], target)


def test_csv_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n")
    with pytest.raises(ValueError, match="unexpected header"):
        read_csv(p)


# -- configs -----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["fig1", "fig2"])
def test_shipped_presets(name):
    exp = default_config(name)
    assert exp.system.num_subcarriers == 64 and len(exp.users) == 4
    assert all(u.energy_weight == 0.25 for u in exp.users)
    assert exp.num_seeds == 100 and set(exp.schemes) == set(SchemeId)


def test_fig1_and_fig2_sweeps():
    assert default_config("fig1").sweep.values == tuple(k * 1e5 for k in range(1, 8))
    fig2 = default_config("fig2")
    assert fig2.sweep.kind is SweepKind.EVE_DISTANCE
    assert fig2.sweep.values == (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    assert all(u.task_bits == 7e5 for u in fig2.users)


def test_config_dict_round_trip():
    exp = default_config("fig2")
    assert config_from_dict(json.loads(json.dumps(config_to_dict(exp)))) == exp


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.pop("sweep"), "missing field 'sweep'"),
    (lambda d: d.update(extra=1), "unknown field"),
    (lambda d: d["system"].update(bandwith_hz=1.0), "system: unknown field"),
    (lambda d: d["users"][2].update(task_bits=-1.0), "users[2]"),
    (lambda d: d["sweep"].update(values=[3.0, 2.0]), "strictly increasing"),
    (lambda d: d.update(num_seeds=0), "num_seeds"),
    (lambda d: d.update(schemes=["Greedy"]), "schemes"),
    (lambda d: d.update(users={}), "users must be a list"),
])
def test_config_errors(mutate, fragment):
    data = config_to_dict(default_config("fig1"))
    mutate(data)
    with pytest.raises(ConfigError) as info:
        config_from_dict(data, "cfg.json")
    assert fragment in str(info.value) and "cfg.json" in str(info.value)


def test_json_syntax_error_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "system": {,\n}')
    with pytest.raises(ConfigError, match=r"line 2, column"):
        load_config(p)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.json")


def test_sweep_validation():
    for bad in ((), (0.0, 1.0), (2.0, 2.0)):
        with pytest.raises(ValueError):
            Sweep("TaskBits", bad)
