import csv
import itertools
import json

import numpy as np
import pytest

from continuum_aif.agents import CONSUMPTION, EXEC_TIME, FPS_LADDER, RESOLUTION_LADDER, SMOOTHNESS
from continuum_aif.env import (
    FPS_VALUES,
    TRACE_COLUMNS,
    DeviceProfile,
    EnvError,
    IngestionError,
    PipelineEnv,
    PipelineEnvState,
    VideoConfig,
    consumption_bin,
    deadline,
    default_profiles,
    exec_time_bin,
    fill_fps_gaps,
    ingest_traces,
    load_profiles_json,
    read_traces,
    smoothness_bin,
    synthetic_backend,
    synthetic_profile,
    trace_coverage,
)

ACTIVE = {"producer": "edge-6.8W", "worker": "edge-6.8W", "consumer": "consumer-6.8W"}
STAY_P = {"Change_FPS": "Stay", "Change_resolution": "Stay"}
STAY_W = {"Switch_GPU": "Stay", "Toggle_comm": "Stay"}
STAY_C = {"Toggle_comm": "Stay"}


def make_state(fps="20", res="480p", wcomm=False, ccomm=False, gpu=False, **kw):
    return PipelineEnvState(VideoConfig(fps, res), wcomm, ccomm, gpu, dict(ACTIVE), **kw)


# ---------------------------------------------------------------- bins and deadline


@pytest.mark.parametrize(
    "ms,label", [(1, "LOW"), (15, "LOW"), (15.01, "MID-LOW"), (33, "MID"), (45, "MID"), (60, "MID-HIGH"), (61, "HIGH")]
)
def test_exec_time_bins(ms, label):
    assert exec_time_bin(ms) == label


@pytest.mark.parametrize("w,label", [(6.99, "LOW"), (7.0, "MID"), (7.5, "MID"), (8.0, "MID"), (8.01, "HIGH")])
def test_consumption_bins(w, label):
    assert consumption_bin(w) == label


@pytest.mark.parametrize("px,label", [(25, "SHORT"), (26, "MID-SHORT"), (75, "MID"), (100, "MID-LONG"), (101, "LONG")])
def test_smoothness_bins(px, label):
    assert smoothness_bin(px) == label


def test_bins_are_monotone():
    xs = np.linspace(0, 150, 3001)
    for fn, labels in ((exec_time_bin, EXEC_TIME), (smoothness_bin, SMOOTHNESS)):
        idx = [labels.index(fn(x)) for x in xs]
        assert idx == sorted(idx)
    idx = [CONSUMPTION.index(consumption_bin(w)) for w in np.linspace(0, 12, 1201)]
    assert idx == sorted(idx)


def test_deadline():
    assert deadline(20) == 50.0
    assert deadline(30) == pytest.approx(33.33, abs=0.01)
    assert deadline(12, override_ms=45) == 45.0


# ---------------------------------------------------------------- stepping


def test_request_routing_examples():
    env = PipelineEnv(default_profiles(), request_mode="static")
    req = env.requests(make_state(wcomm=True, ccomm=False))
    assert (req.worker_fps_request, req.consumer_fps_request, req.consumer_resolution_request) == ("Decrease", "Stay", "Stay")
    req = env.requests(make_state(wcomm=False, ccomm=True))
    assert (req.worker_fps_request, req.consumer_fps_request, req.consumer_resolution_request) == ("Stay", "Increase", "Increase")


def test_need_mode_silences_satisfied_services():
    env = PipelineEnv(default_profiles(), request_mode="need")
    ok = env.requests(make_state(wcomm=True, ccomm=True))
    assert (ok.worker_fps_request, ok.consumer_fps_request, ok.consumer_resolution_request) == ("Stay", "Stay", "Stay")
    bad = env.requests(
        make_state(wcomm=True, ccomm=True, worker_latency_ok=False, consumer_success_ok=False, consumer_smooth_ok=True)
    )
    assert (bad.worker_fps_request, bad.consumer_fps_request, bad.consumer_resolution_request) == ("Decrease", "Stay", "Increase")


@pytest.mark.parametrize("mode", ["static", "need"])
def test_disabled_channels_always_stay(mode):
    env = PipelineEnv(default_profiles(), noise=0.05, request_mode=mode)
    rng = np.random.default_rng(5)
    state, _ = env.reset(rng, ACTIVE)
    changes = ("Increase", "Stay", "Decrease")
    for _ in range(300):
        p = {"Change_FPS": changes[rng.integers(3)], "Change_resolution": changes[rng.integers(3)]}
        w = {"Switch_GPU": ("Switch on", "Switch off", "Stay")[rng.integers(3)], "Toggle_comm": ("Enable", "Disable", "Stay")[rng.integers(3)]}
        c = {"Toggle_comm": ("Enable", "Disable", "Stay")[rng.integers(3)]}
        state, obs = env.step(state, p, w, c, rng)
        assert state.config.fps in FPS_LADDER and state.config.resolution in RESOLUTION_LADDER
        if not state.worker_comm:
            assert obs["producer"]["WF"] == "Stay"
        if not state.consumer_comm:
            assert obs["producer"]["CF"] == "Stay" and obs["producer"]["CR"] == "Stay"


def test_ladder_floor_and_step_counter():
    env = PipelineEnv(default_profiles())
    rng = np.random.default_rng(0)
    state = make_state(fps="12")
    new, obs = env.step(state, {"Change_FPS": "Decrease", "Change_resolution": "Increase"}, STAY_W, STAY_C, rng)
    assert new.config.fps == "12" and new.config.resolution == "720p"
    assert obs["producer"]["FPS"] == "12" and new.step == state.step + 1


def test_same_seed_same_observations():
    env = PipelineEnv(default_profiles(), noise=0.1)
    a = env.step(make_state(), STAY_P, STAY_W, STAY_C, np.random.default_rng(11))
    b = env.step(make_state(), STAY_P, STAY_W, STAY_C, np.random.default_rng(11))
    assert a == b


def test_noise_flip_rate_within_binomial_bound():
    env = synthetic_backend(0.1)
    rng = np.random.default_rng(77)
    n = 10_000
    flips = sum(env._perturb("MID", EXEC_TIME, rng) != "MID" for _ in range(n))
    sigma = np.sqrt(n * 0.1 * 0.9)
    assert abs(flips - n * 0.1) < 3 * sigma


def test_zero_noise_leaves_bins_untouched():
    env = synthetic_backend(0.0)
    rng = np.random.default_rng(1)
    assert all(env._perturb("HIGH", EXEC_TIME, rng) == "HIGH" for _ in range(1000))


@pytest.mark.parametrize("eps,ok", [(0.0, True), (0.49, True), (0.5, False), (-0.1, False)])
def test_noise_bounds(eps, ok):
    if ok:
        synthetic_backend(eps)
    else:
        with pytest.raises(EnvError):
            synthetic_backend(eps)


# ---------------------------------------------------------------- device swap


def test_swap_shifts_consumption_one_bin():
    edge = synthetic_profile()
    hot = edge.with_power_offset(2.0, "hot")
    # oracle: base 6.8 W with comm (+0.5) sits in MID; +2 W lands in HIGH
    assert consumption_bin(edge.base_power + edge.comm_power_delta) == "MID"
    assert consumption_bin(hot.base_power + hot.comm_power_delta) == "HIGH"
    profiles = {**default_profiles(), "hot": hot}
    env = PipelineEnv(profiles)
    state = make_state(wcomm=True)
    swapped = env.swap_device(state, "worker", "hot")
    assert swapped.config == state.config and swapped.worker_comm
    rng = np.random.default_rng(3)
    before = [env.step(state, STAY_P, STAY_W, STAY_C, rng)[1]["worker"]["W-consumption"] for _ in range(200)]
    after = [env.step(swapped, STAY_P, STAY_W, STAY_C, rng)[1]["worker"]["W-consumption"] for _ in range(200)]
    assert max(set(before), key=before.count) == "MID"
    assert max(set(after), key=after.count) == "HIGH"


def test_swap_isolation_and_identity():
    env = PipelineEnv({**default_profiles(), "twin": synthetic_profile("twin")})
    state = make_state()
    a = env.step(state, STAY_P, STAY_W, STAY_C, np.random.default_rng(9))[1]
    b = env.step(env.swap_device(state, "worker", "twin"), STAY_P, STAY_W, STAY_C, np.random.default_rng(9))[1]
    assert a == b
    c = env.step(env.swap_device(state, "producer", "edge-8.8W"), STAY_P, STAY_W, STAY_C, np.random.default_rng(9))[1]
    assert c["worker"] == a["worker"]
    with pytest.raises(EnvError):
        env.swap_device(state, "worker", "missing")


# ---------------------------------------------------------------- traces


def write_trace(path, device="jetson", skip=(), base_ms=10.0, extra_col=False, bad_row=None):
    header = list(TRACE_COLUMNS) + (["temperature"] if extra_col else [])
    rows = []
    for res, fps, gpu in itertools.product(RESOLUTION_LADDER, FPS_VALUES, (0, 1)):
        if (res, fps, gpu) in skip:
            continue
        for k in range(2):
            ms = base_ms + fps + (5 if k else -5) - 8 * gpu
            watts = 6.5 + 1.5 * gpu + 0.01 * k
            row = [ms, 40, 800, watts, res, fps, 1, 600 / fps, device, gpu]
            rows.append(row + ([55] if extra_col else []))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, row in enumerate(rows):
            line = i + 2
            if bad_row is not None and line == bad_row:
                row = list(row)
                row[0] = "oops"
            w.writerow(row)
    return path


def test_complete_grid_needs_no_fills(tmp_path):
    path = write_trace(tmp_path / "t.csv")
    cov = trace_coverage(read_traces(path))
    assert cov[0].filled == [] and cov[0].unfillable == []
    profiles = ingest_traces(path)
    assert profiles[0].missing_cells() == []
    # re-running the fill on a complete table is a no-op
    again = fill_fps_gaps(profiles[0].exec_time_table)
    assert again.filled == [] and again.table == profiles[0].exec_time_table


def test_interior_gap_is_neighbour_average(tmp_path):
    path = write_trace(tmp_path / "t.csv", skip={("480p", 20, 0)})
    prof = ingest_traces(path)[0]
    lo, hi = prof.exec_time_table[("480p", 16, False)], prof.exec_time_table[("480p", 26, False)]
    mean, std = prof.exec_time_table[("480p", 20, False)]
    assert mean == pytest.approx((lo[0] + hi[0]) / 2)
    assert std == pytest.approx((lo[1] + hi[1]) / 2)
    assert ("480p", 20, False) in trace_coverage(read_traces(path))[0].filled


def test_fill_example_values():
    table = {("720p", 16, False): (20.0, 2.0), ("720p", 26, False): (30.0, 4.0)}
    out = fill_fps_gaps(table, gpu_values=(False,))
    assert out.table[("720p", 20, False)] == (25.0, 3.0)


def test_edge_gap_aborts_ingestion(tmp_path):
    path = write_trace(tmp_path / "t.csv", skip={("240p", 12, 1)})
    with pytest.raises(IngestionError, match="interpolate"):
        ingest_traces(path)


def test_malformed_row_is_named(tmp_path):
    path = write_trace(tmp_path / "t.csv", bad_row=17)
    with pytest.raises(IngestionError, match="row 17"):
        read_traces(path)


def test_unknown_labels_rejected(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text(",".join(TRACE_COLUMNS) + "\n10,1,1,7,720p,25,1,20,dev,0\n")
    with pytest.raises(IngestionError, match="fps 25"):
        read_traces(path)


def test_extra_columns_warn(tmp_path, caplog):
    path = write_trace(tmp_path / "t.csv", extra_col=True)
    with caplog.at_level("WARNING"):
        read_traces(path)
    assert "temperature" in caplog.text


def test_missing_file():
    with pytest.raises(IngestionError):
        read_traces("/nonexistent/trace.csv")


def test_profile_json_round_trip(tmp_path):
    prof = synthetic_profile("dev-x")
    path = tmp_path / "p.json"
    path.write_text(json.dumps([prof.to_dict()]))
    (loaded,) = load_profiles_json(path)
    assert loaded == DeviceProfile.from_dict(prof.to_dict())
    assert loaded.exec_time_table == prof.exec_time_table
