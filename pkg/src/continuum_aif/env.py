"""Ground-truth simulator of the Producer -> Worker -> Consumer pipeline.

The environment owns the camera configuration, the GPU and communication
switches, and one device profile per service. Every step it applies the three
agents' actions jointly, samples measurements from the active profiles and
discretises them into each agent's observation modalities.
"""

from __future__ import annotations

import bisect
import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .agents import (
    BOOL,
    CONSUMPTION,
    EXEC_TIME,
    FPS_LADDER,
    GPU_STATES,
    RESOLUTION_LADDER,
    SMOOTHNESS,
)

log = logging.getLogger(__name__)

FPS_VALUES = tuple(int(f) for f in FPS_LADDER)
SERVICES = ("producer", "worker", "consumer")

EXEC_TIME_EDGES = (15.0, 30.0, 45.0, 60.0)  # ms, right-closed bins
SMOOTHNESS_EDGES = (25.0, 50.0, 75.0, 100.0)  # px, right-closed bins
WATT_LOW, WATT_HIGH = 7.0, 8.0

TRACE_COLUMNS = (
    "execution_time_ms",
    "cpu_util",
    "memory_mb",
    "energy_w",
    "resolution",
    "fps",
    "success",
    "smoothness_px",
    "device_type",
    "gpu",
)

# Measured observation modalities that the synthetic noise may perturb.
NOISY_MODALITIES = {
    "worker": ("Latency", "ExecTime", "W-consumption"),
    "consumer": ("Success", "Smoothness", "C-consumption"),
}


class EnvError(RuntimeError):
    pass


class IngestionError(EnvError):
    """Trace data is unreadable or does not cover the configuration grid."""


# --------------------------------------------------------------------------
# Binning
# --------------------------------------------------------------------------


def exec_time_bin(ms: float) -> str:
    return EXEC_TIME[bisect.bisect_left(EXEC_TIME_EDGES, ms)]


def smoothness_bin(px: float) -> str:
    return SMOOTHNESS[bisect.bisect_left(SMOOTHNESS_EDGES, px)]


def consumption_bin(watts: float) -> str:
    if watts < WATT_LOW:
        return CONSUMPTION[0]
    if watts <= WATT_HIGH:
        return CONSUMPTION[1]
    return CONSUMPTION[2]


def deadline(fps: int, override_ms: float | None = None) -> float:
    """Per-batch processing budget in milliseconds."""
    if override_ms is not None:
        return float(override_ms)
    if fps not in FPS_VALUES:
        raise EnvError(f"fps {fps} is not on the ladder {FPS_VALUES}")
    return 1000.0 / fps


# --------------------------------------------------------------------------
# Device profiles
# --------------------------------------------------------------------------

Cell = tuple[str, int, bool]  # (resolution, fps, gpu)


@dataclass(frozen=True)
class DeviceProfile:
    """Measurement distributions of one device, as (mean, std) pairs."""

    name: str
    base_power: float
    gpu_power_delta: float
    comm_power_delta: float
    exec_time_table: Mapping[Cell, tuple[float, float]]
    success_rate: Mapping[str, float]
    smoothness_table: Mapping[int, tuple[float, float]]
    # GPU-inclusive power draw per cell; falls back to base + gpu delta.
    energy_table: Mapping[Cell, tuple[float, float]] | None = None
    power_std: float = 0.1

    def __post_init__(self):
        for label, v in (("base_power", self.base_power), ("gpu_power_delta", self.gpu_power_delta),
                         ("comm_power_delta", self.comm_power_delta), ("power_std", self.power_std)):
            if v < 0:
                raise EnvError(f"profile {self.name}: {label} must be >= 0")
        for table in (self.exec_time_table, self.smoothness_table, self.energy_table or {}):
            for key, (_, std) in table.items():
                if std < 0:
                    raise EnvError(f"profile {self.name}: negative std at {key}")

    def missing_cells(self) -> list[str]:
        missing = []
        for res in RESOLUTION_LADDER:
            if res not in self.success_rate:
                missing.append(f"success_rate[{res}]")
            for fps in FPS_VALUES:
                for gpu in (False, True):
                    if (res, fps, gpu) not in self.exec_time_table:
                        missing.append(f"exec_time[{res},{fps},gpu={int(gpu)}]")
                    if self.energy_table is not None and (res, fps, gpu) not in self.energy_table:
                        missing.append(f"energy[{res},{fps},gpu={int(gpu)}]")
        missing += [f"smoothness[{fps}]" for fps in FPS_VALUES if fps not in self.smoothness_table]
        return missing

    def power(self, cell: Cell, comm: bool) -> tuple[float, float]:
        if self.energy_table is not None:
            mean, std = self.energy_table[cell]
        else:
            mean, std = self.base_power + (self.gpu_power_delta if cell[2] else 0.0), self.power_std
        return mean + (self.comm_power_delta if comm else 0.0), std

    def with_power_offset(self, watts: float, name: str | None = None) -> "DeviceProfile":
        energy = None
        if self.energy_table is not None:
            energy = {k: (m + watts, s) for k, (m, s) in self.energy_table.items()}
        return replace(self, name=name or f"{self.name}+{watts:g}W", base_power=self.base_power + watts,
                       energy_table=energy)

    def to_dict(self) -> dict:
        def cells(table):
            return [
                {"resolution": r, "fps": f, "gpu": int(g), "mean": m, "std": s}
                for (r, f, g), (m, s) in sorted(table.items(), key=lambda kv: _cell_order(kv[0]))
            ]

        return {
            "name": self.name,
            "base_power": self.base_power,
            "gpu_power_delta": self.gpu_power_delta,
            "comm_power_delta": self.comm_power_delta,
            "power_std": self.power_std,
            "exec_time_table": cells(self.exec_time_table),
            "energy_table": None if self.energy_table is None else cells(self.energy_table),
            "success_rate": {r: self.success_rate[r] for r in RESOLUTION_LADDER if r in self.success_rate},
            "smoothness_table": [
                {"fps": f, "mean": m, "std": s} for f, (m, s) in sorted(self.smoothness_table.items())
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DeviceProfile":
        def cells(rows):
            return {(_norm_resolution(r["resolution"]), int(r["fps"]), bool(int(r["gpu"]))): (float(r["mean"]), float(r["std"])) for r in rows}

        try:
            return cls(
                name=str(d["name"]),
                base_power=float(d["base_power"]),
                gpu_power_delta=float(d["gpu_power_delta"]),
                comm_power_delta=float(d["comm_power_delta"]),
                power_std=float(d.get("power_std", 0.1)),
                exec_time_table=cells(d["exec_time_table"]),
                energy_table=None if d.get("energy_table") is None else cells(d["energy_table"]),
                success_rate={_norm_resolution(k): float(v) for k, v in d["success_rate"].items()},
                smoothness_table={int(r["fps"]): (float(r["mean"]), float(r["std"])) for r in d["smoothness_table"]},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestionError(f"malformed device profile document: {exc}") from exc


def _cell_order(cell: Cell):
    r, f, g = cell
    return (RESOLUTION_LADDER.index(r), f, g)


def load_profiles_json(path: str | Path) -> list[DeviceProfile]:
    """Read one profile document or a list of them."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IngestionError(f"cannot read profile file {path}: {exc}") from exc
    docs = doc if isinstance(doc, list) else [doc]
    return [DeviceProfile.from_dict(d) for d in docs]


_PIXELS = {r: int(r[:-1]) ** 2 / 720**2 for r in RESOLUTION_LADDER}


def synthetic_profile(
    name: str = "edge-6.8W",
    base_power: float = 6.8,
    gpu_power_delta: float = 1.5,
    comm_power_delta: float = 0.5,
    cpu_ms: tuple[float, float] = (2.0, 10.0),
    gpu_ms: tuple[float, float] = (4.0, 10.0),
    rel_std: float = 0.08,
    shift_px_s: float = 500.0,
    shift_std: float = 3.0,
) -> DeviceProfile:
    """Rule-based profile: execution time grows with pixel count, GPU cuts it,
    faster frame rates shrink the pixel shift between frames."""
    exec_table = {}
    for res in RESOLUTION_LADDER:
        px = _PIXELS[res]
        for fps in FPS_VALUES:
            for gpu in (False, True):
                a, b = gpu_ms if gpu else cpu_ms
                mean = a + b * px
                exec_table[(res, fps, gpu)] = (mean, rel_std * mean)
    success = dict(zip(RESOLUTION_LADDER, (0.55, 0.7, 0.82, 0.93, 0.97, 0.99)))
    smooth = {fps: (shift_px_s / fps, shift_std) for fps in FPS_VALUES}
    return DeviceProfile(name, base_power, gpu_power_delta, comm_power_delta, exec_table, success, smooth)


def default_profiles() -> dict[str, DeviceProfile]:
    edge = synthetic_profile()
    return {
        edge.name: edge,
        "edge-8.8W": edge.with_power_offset(2.0, "edge-8.8W"),
        "consumer-6.8W": synthetic_profile("consumer-6.8W"),
    }


# --------------------------------------------------------------------------
# Trace ingestion
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRecord:
    execution_time_ms: float
    cpu_util: float
    memory_mb: float
    energy_w: float
    resolution: str
    fps: int
    success: bool
    smoothness_px: float
    device_type: str
    gpu: bool


def _norm_resolution(value) -> str:
    s = str(value).strip()
    if not s.endswith("p"):
        s = f"{s}p"
    if s not in RESOLUTION_LADDER:
        raise ValueError(f"unknown resolution {value!r}")
    return s


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "1.0"):
        return True
    if v in ("0", "false", "0.0"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def read_traces(path: str | Path) -> list[TraceRecord]:
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"trace file {path} does not exist")
    records = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in TRACE_COLUMNS if c not in header]
        if missing:
            raise IngestionError(f"{path}: missing columns {missing}")
        extra = [c for c in header if c not in TRACE_COLUMNS]
        if extra:
            log.warning("ignoring unknown trace columns %s", extra)
        for row in reader:
            line = reader.line_num
            try:
                rec = TraceRecord(
                    execution_time_ms=float(row["execution_time_ms"]),
                    cpu_util=float(row["cpu_util"]),
                    memory_mb=float(row["memory_mb"]),
                    energy_w=float(row["energy_w"]),
                    resolution=_norm_resolution(row["resolution"]),
                    fps=int(float(row["fps"])),
                    success=_parse_bool(row["success"]),
                    smoothness_px=float(row["smoothness_px"]),
                    device_type=row["device_type"].strip(),
                    gpu=_parse_bool(row["gpu"]),
                )
            except (TypeError, ValueError, AttributeError) as exc:
                raise IngestionError(f"{path}: row {line}: {exc}") from None
            if rec.fps not in FPS_VALUES:
                raise IngestionError(f"{path}: row {line}: fps {rec.fps} is not on the ladder {FPS_VALUES}")
            physical = (rec.execution_time_ms, rec.cpu_util, rec.memory_mb, rec.energy_w, rec.smoothness_px)
            if any(v < 0 or not math.isfinite(v) for v in physical):
                raise IngestionError(f"{path}: row {line}: negative or non-finite measurement")
            records.append(rec)
    return records


def _stats(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


@dataclass
class GridFill:
    """Result of filling a (resolution, fps, gpu) table along the fps ladder."""

    table: dict[Cell, tuple[float, float]]
    filled: list[Cell] = field(default_factory=list)
    unfillable: list[Cell] = field(default_factory=list)


def fill_fps_gaps(table: Mapping[Cell, tuple[float, float]], gpu_values=(False, True)) -> GridFill:
    """Fill each missing fps cell with the average of its two ladder neighbours.

    The neighbours must both be measured; edge cells and runs of consecutive
    gaps cannot be filled and are reported as unfillable.
    """
    out = GridFill(dict(table))
    for res in RESOLUTION_LADDER:
        for gpu in gpu_values:
            for i, fps in enumerate(FPS_VALUES):
                cell = (res, fps, gpu)
                if cell in table:
                    continue
                lo = (res, FPS_VALUES[i - 1], gpu) if i > 0 else None
                hi = (res, FPS_VALUES[i + 1], gpu) if i + 1 < len(FPS_VALUES) else None
                if lo in table and hi in table:
                    (m1, s1), (m2, s2) = table[lo], table[hi]
                    out.table[cell] = ((m1 + m2) / 2, (s1 + s2) / 2)
                    out.filled.append(cell)
                else:
                    out.unfillable.append(cell)
    return out


@dataclass
class DeviceCoverage:
    device: str
    records: int
    measured: int
    filled: list[Cell]
    unfillable: list[Cell]

    @property
    def grid_size(self) -> int:
        return len(RESOLUTION_LADDER) * len(FPS_VALUES) * 2


def _group(records: list[TraceRecord]) -> dict[str, list[TraceRecord]]:
    groups: dict[str, list[TraceRecord]] = {}
    for r in records:
        groups.setdefault(r.device_type, []).append(r)
    return dict(sorted(groups.items()))


def _cell_tables(recs: list[TraceRecord]):
    exec_vals: dict[Cell, list[float]] = {}
    energy_vals: dict[Cell, list[float]] = {}
    for r in recs:
        cell = (r.resolution, r.fps, r.gpu)
        exec_vals.setdefault(cell, []).append(r.execution_time_ms)
        energy_vals.setdefault(cell, []).append(r.energy_w)
    return {k: _stats(v) for k, v in exec_vals.items()}, {k: _stats(v) for k, v in energy_vals.items()}


def trace_coverage(records: list[TraceRecord]) -> list[DeviceCoverage]:
    out = []
    for device, recs in _group(records).items():
        exec_table, _ = _cell_tables(recs)
        fill = fill_fps_gaps(exec_table)
        out.append(DeviceCoverage(device, len(recs), len(exec_table), fill.filled, fill.unfillable))
    return out


def profiles_from_records(
    records: list[TraceRecord], comm_power_delta: float = 0.5, default_gpu_delta: float = 1.5
) -> list[DeviceProfile]:
    profiles = []
    for device, recs in _group(records).items():
        exec_table, energy_table = _cell_tables(recs)
        exec_fill = fill_fps_gaps(exec_table)
        energy_fill = fill_fps_gaps(energy_table)
        if exec_fill.unfillable:
            cells = ", ".join(f"{r}/{f}fps/gpu={int(g)}" for r, f, g in exec_fill.unfillable[:5])
            raise IngestionError(f"device {device}: cannot interpolate cells without two measured neighbours: {cells}")

        success: dict[str, list[bool]] = {}
        smooth: dict[int, list[float]] = {}
        for r in recs:
            success.setdefault(r.resolution, []).append(r.success)
            smooth.setdefault(r.fps, []).append(r.smoothness_px)
        missing_res = [res for res in RESOLUTION_LADDER if res not in success]
        if missing_res:
            raise IngestionError(f"device {device}: no success samples for resolutions {missing_res}")
        smooth_table = {f: _stats(v) for f, v in smooth.items()}
        smooth_cells = fill_fps_gaps({("720p", f, False): v for f, v in smooth_table.items()}, gpu_values=(False,))
        smooth_cells.unfillable = [c for c in smooth_cells.unfillable if c[0] == "720p"]
        if smooth_cells.unfillable:
            raise IngestionError(f"device {device}: smoothness missing for fps {[c[1] for c in smooth_cells.unfillable]}")
        smooth_table = {f: v for (res, f, _), v in smooth_cells.table.items() if res == "720p"}

        cpu = [r.energy_w for r in recs if not r.gpu]
        gpu = [r.energy_w for r in recs if r.gpu]
        base = float(np.mean(cpu)) if cpu else float(np.mean(gpu))
        gpu_delta = max(float(np.mean(gpu)) - base, 0.0) if cpu and gpu else default_gpu_delta
        profiles.append(
            DeviceProfile(
                name=device,
                base_power=base,
                gpu_power_delta=gpu_delta,
                comm_power_delta=comm_power_delta,
                exec_time_table=exec_fill.table,
                success_rate={res: float(np.mean(v)) for res, v in success.items()},
                smoothness_table=smooth_table,
                energy_table=energy_fill.table if not energy_fill.unfillable else None,
            )
        )
    return profiles


def ingest_traces(path: str | Path) -> list[DeviceProfile]:
    """Parse a trace CSV into one filled :class:`DeviceProfile` per device type."""
    records = read_traces(path)
    if not records:
        raise IngestionError(f"{path}: no trace records")
    return profiles_from_records(records)


# --------------------------------------------------------------------------
# Environment state and dynamics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VideoConfig:
    fps: str
    resolution: str

    def __post_init__(self):
        if self.fps not in FPS_LADDER:
            raise EnvError(f"fps {self.fps!r} not on ladder {FPS_LADDER}")
        if self.resolution not in RESOLUTION_LADDER:
            raise EnvError(f"resolution {self.resolution!r} not on ladder {RESOLUTION_LADDER}")

    def changed(self, fps_action: str, res_action: str) -> "VideoConfig":
        return VideoConfig(_move(FPS_LADDER, self.fps, fps_action), _move(RESOLUTION_LADDER, self.resolution, res_action))


def _move(ladder, value, action) -> str:
    i = ladder.index(value)
    if action == "Increase":
        i = min(i + 1, len(ladder) - 1)
    elif action == "Decrease":
        i = max(i - 1, 0)
    return ladder[i]


@dataclass(frozen=True)
class RequestBundle:
    worker_fps_request: str = "Stay"
    consumer_fps_request: str = "Stay"
    consumer_resolution_request: str = "Stay"


@dataclass(frozen=True)
class PipelineEnvState:
    config: VideoConfig
    worker_comm: bool
    consumer_comm: bool
    gpu_on: bool
    active_profiles: Mapping[str, str]
    step: int = 0
    # Last observed SLOiD outcomes, consulted by the need-driven request mode.
    worker_latency_ok: bool = True
    consumer_success_ok: bool = True
    consumer_smooth_ok: bool = True


class PipelineEnv:
    """Samples observations for the three agents from the active device profiles.

    ``noise`` is the probability that each measured categorical observation is
    replaced by a uniformly chosen neighbouring bin.
    """

    def __init__(
        self,
        profiles: Mapping[str, DeviceProfile] | None = None,
        *,
        noise: float = 0.0,
        request_mode: str = "need",
        deadline_ms: float | None = None,
    ):
        if not 0.0 <= noise < 0.5:
            raise EnvError(f"noise must satisfy 0 <= noise < 0.5, got {noise}")
        if request_mode not in ("static", "need"):
            raise EnvError(f"unknown request mode {request_mode!r}")
        self.profiles = dict(profiles if profiles is not None else default_profiles())
        for p in self.profiles.values():
            missing = p.missing_cells()
            if missing:
                raise IngestionError(f"profile {p.name} is incomplete: {missing[:5]}")
        self.noise = noise
        self.request_mode = request_mode
        self.deadline_ms = deadline_ms

    def reset(
        self,
        rng: np.random.Generator,
        active_profiles: Mapping[str, str],
    ) -> tuple[PipelineEnvState, dict[str, dict[str, str]]]:
        """Random initial configuration plus the observations it produces."""
        for service, name in active_profiles.items():
            self._profile(name)
        config = VideoConfig(FPS_LADDER[rng.integers(len(FPS_LADDER))], RESOLUTION_LADDER[rng.integers(len(RESOLUTION_LADDER))])
        gpu, wcomm, ccomm = (bool(b) for b in rng.integers(0, 2, size=3))
        state = PipelineEnvState(config, wcomm, ccomm, gpu, dict(active_profiles))
        return state, self._observe(state, rng)

    def _profile(self, name: str) -> DeviceProfile:
        try:
            return self.profiles[name]
        except KeyError:
            raise EnvError(f"unknown device profile {name!r}; known: {sorted(self.profiles)}") from None

    def swap_device(self, state: PipelineEnvState, service: str, profile: str) -> PipelineEnvState:
        if service not in SERVICES:
            raise EnvError(f"unknown service {service!r}")
        self._profile(profile)
        active = dict(state.active_profiles)
        active[service] = profile
        return replace(state, active_profiles=active)

    def step(
        self,
        state: PipelineEnvState,
        producer_action: Mapping[str, str],
        worker_action: Mapping[str, str],
        consumer_action: Mapping[str, str],
        rng: np.random.Generator,
    ) -> tuple[PipelineEnvState, dict[str, dict[str, str]]]:
        config = state.config.changed(producer_action["Change_FPS"], producer_action["Change_resolution"])
        gpu = _toggle(state.gpu_on, worker_action["Switch_GPU"], "Switch on", "Switch off")
        wcomm = _toggle(state.worker_comm, worker_action["Toggle_comm"], "Enable", "Disable")
        ccomm = _toggle(state.consumer_comm, consumer_action["Toggle_comm"], "Enable", "Disable")
        new = replace(state, config=config, gpu_on=gpu, worker_comm=wcomm, consumer_comm=ccomm, step=state.step + 1)
        obs = self._observe(new, rng)
        new = replace(
            new,
            worker_latency_ok=obs["worker"]["Latency"] == "True",
            consumer_success_ok=obs["consumer"]["Success"] == "True",
            consumer_smooth_ok=SMOOTHNESS.index(obs["consumer"]["Smoothness"]) <= SMOOTHNESS.index("MID"),
        )
        return new, obs

    def requests(self, state: PipelineEnvState) -> RequestBundle:
        need = self.request_mode == "need"
        wf = "Decrease" if state.worker_comm and not (need and state.worker_latency_ok) else "Stay"
        cf = "Increase" if state.consumer_comm and not (need and state.consumer_smooth_ok) else "Stay"
        cr = "Increase" if state.consumer_comm and not (need and state.consumer_success_ok) else "Stay"
        return RequestBundle(wf, cf, cr)

    def _observe(self, state: PipelineEnvState, rng: np.random.Generator) -> dict[str, dict[str, str]]:
        cfg = state.config
        fps = int(cfg.fps)
        cell = (cfg.resolution, fps, state.gpu_on)
        worker = self._profile(state.active_profiles["worker"])
        consumer = self._profile(state.active_profiles["consumer"])

        exec_ms = _draw(rng, *worker.exec_time_table[cell])
        w_watts = _draw(rng, *worker.power(cell, state.worker_comm))
        success = bool(rng.random() < consumer.success_rate[cfg.resolution])
        shift = _draw(rng, *consumer.smoothness_table[fps])
        c_cell = (cfg.resolution, fps, False)
        c_watts = _draw(rng, *consumer.power(c_cell, state.consumer_comm))

        req = self.requests(state)
        obs = {
            "producer": {
                "WF": req.worker_fps_request,
                "CF": req.consumer_fps_request,
                "CR": req.consumer_resolution_request,
                "FPS": cfg.fps,
                "Resolution": cfg.resolution,
            },
            "worker": {
                "Latency": str(exec_ms <= deadline(fps, self.deadline_ms)),
                "ExecTime": exec_time_bin(exec_ms),
                "FPS": cfg.fps,
                "W-consumption": consumption_bin(w_watts),
                "ShareInfo": str(state.worker_comm),
                "GPU": GPU_STATES[int(state.gpu_on)],
            },
            "consumer": {
                "Success": str(success),
                "Smoothness": smoothness_bin(shift),
                "C-consumption": consumption_bin(c_watts),
                "FPS": cfg.fps,
                "Resolution": cfg.resolution,
                "ShareInfo": str(state.consumer_comm),
            },
        }
        if self.noise > 0:
            for agent, modalities in NOISY_MODALITIES.items():
                for m in modalities:
                    obs[agent][m] = self._perturb(obs[agent][m], _LABELS[m], rng)
        return obs

    def _perturb(self, label: str, labels: tuple[str, ...], rng: np.random.Generator) -> str:
        if rng.random() >= self.noise:
            return label
        i = labels.index(label)
        neighbours = [j for j in (i - 1, i + 1) if 0 <= j < len(labels)]
        return labels[neighbours[rng.integers(len(neighbours))]]


_LABELS = {
    "Latency": BOOL,
    "Success": BOOL,
    "ExecTime": EXEC_TIME,
    "Smoothness": SMOOTHNESS,
    "W-consumption": CONSUMPTION,
    "C-consumption": CONSUMPTION,
}


def _toggle(current: bool, action: str, on: str, off: str) -> bool:
    if action == on:
        return True
    if action == off:
        return False
    return current


def _draw(rng: np.random.Generator, mean: float, std: float) -> float:
    return max(float(rng.normal(mean, std)) if std > 0 else float(mean), 0.0)


def synthetic_backend(noise: float = 0.05, **kwargs) -> PipelineEnv:
    """Environment over the built-in synthetic profiles; ``noise`` is the flip probability."""
    return PipelineEnv(default_profiles(), noise=noise, **kwargs)
