"""Episode runner, metrics and artifact writers for the pipeline experiments."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .agents import AGENT_NAMES, AgentSpec, build_agent, evaluate_sloids, make_learning_variant
from .env import DeviceProfile, PipelineEnv, default_profiles, ingest_traces, load_profiles_json
from .inference import (
    BeliefState,
    TransitionModel,
    dirichlet_novelty_weights,
    evaluate_policies,
    infer_state,
    normalize_counts,
    select_action,
    update_transition_counts,
)

log = logging.getLogger(__name__)

SCENARIOS = ("expert", "learning", "hardware_switch_expert", "hardware_switch_learning", "cost_study")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "expert"
    policy_length: int = 3
    steps: int = 200
    repetitions: int = 10
    seed: int = 0
    backend: str = "synthetic"
    noise: float = 0.05
    request_mode: str = "need"
    precision: float = 16.0
    selection: str = "deterministic"
    learning_rate: float = 1.0
    prior_count: float = 1.0
    param_info_gain: bool = False
    switch_step: int = 75
    switch_service: str = "worker"
    switch_power_offset: float = 2.0
    deadline_ms: float | None = None
    producer_profile: str | None = None
    worker_profile: str | None = None
    consumer_profile: str | None = None
    switch_profile: str | None = None
    trace_path: str | None = None
    profile_path: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {list(SCENARIOS)}, got {self.scenario!r}")
        if self.policy_length < 1:
            raise ConfigError("policy_length must be ≥ 1")
        if self.steps < 1:
            raise ConfigError("steps must be ≥ 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be ≥ 1")
        if self.backend not in ("synthetic", "trace"):
            raise ConfigError(f"backend must be 'synthetic' or 'trace', got {self.backend!r}")
        if self.backend == "trace" and not self.trace_path:
            raise ConfigError("backend 'trace' needs trace_path")
        if not 0 <= self.noise < 0.5:
            raise ConfigError("noise must satisfy 0 ≤ noise < 0.5")
        if self.request_mode not in ("static", "need"):
            raise ConfigError("request_mode must be 'static' or 'need'")
        if self.selection not in ("deterministic", "sample"):
            raise ConfigError("selection must be 'deterministic' or 'sample'")
        if self.precision <= 0:
            raise ConfigError("precision must be > 0")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.prior_count <= 0:
            raise ConfigError("prior_count must be > 0")
        if self.is_switch and not 0 < self.switch_step < self.steps:
            raise ConfigError("switch_step must lie strictly between 0 and steps")

    @property
    def is_switch(self) -> bool:
        return self.scenario.startswith("hardware_switch")

    @property
    def learning(self) -> bool:
        return self.scenario in ("learning", "hardware_switch_learning")

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        kwargs = {}
        for key, raw in values.items():
            kwargs[key] = _coerce(key, raw, cls.__dataclass_fields__[key].type)
        return cls(**kwargs)


def _coerce(key: str, raw, type_name: str):
    if raw is None:
        return None
    base = str(type_name).replace(" | None", "")
    try:
        if base == "int":
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(raw)
            return int(raw)
        if base == "float":
            return float(raw)
        if base == "bool":
            if isinstance(raw, bool):
                return raw
            if str(raw).lower() in ("1", "true", "yes", "on"):
                return True
            if str(raw).lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {raw!r} for {key} ({base})") from None


# --------------------------------------------------------------------------
# Agents at runtime
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    observation: Mapping[str, str]
    action: Mapping[str, str]
    efe: float
    pragmatic_value: float
    info_gain: float
    sloids: Mapping[str, bool]
    planning_ms: float


class Agent:
    """Plans with an :class:`AgentSpec`; owns a private copy of its Dirichlet counts."""

    def __init__(self, spec: AgentSpec, config: ExperimentConfig, rng: np.random.Generator):
        self.spec = spec
        self.config = config
        self.rng = rng
        self.counts = spec.counts
        self.model: TransitionModel = spec.model
        self.belief: BeliefState = spec.prior

    def observe(self, observation: Mapping[str, str]) -> None:
        self.belief = infer_state(observation, self.spec.factors)

    def plan(self):
        novelty = None
        if self.config.param_info_gain and self.counts is not None:
            novelty = [dirichlet_novelty_weights(c) for c in self.counts.counts]
        report = evaluate_policies(self.belief, self.model, self.spec.preferences, self.config.policy_length, novelty=novelty)
        j, _ = select_action(report, self.config.precision, mode=self.config.selection, rng=self.rng)
        # Report the best policy among those that begin with the chosen action.
        block = report.n_joint ** (report.policy_length - 1)
        best = j * block + int(np.argmin(report.efe[j * block : (j + 1) * block]))
        action = self.spec.controls.joint_labels(self.spec.controls.joint_from_index(j))
        return action, report.entry(best)

    def learn(self, prev_belief: BeliefState, action: Mapping[str, str]) -> None:
        if self.counts is None:
            return
        self.counts = update_transition_counts(self.counts, prev_belief, action, self.belief, self.config.learning_rate)
        self.model = normalize_counts(self.counts)


# --------------------------------------------------------------------------
# Episodes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    seed: int
    records: Mapping[str, tuple[StepRecord, ...]]
    events: tuple[tuple[int, str], ...] = ()
    initial: Mapping[str, object] = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        return self.config.config_hash()

    def fulfilled(self, agent: str, sloid: str) -> np.ndarray:
        return np.array([r.sloids[sloid] for r in self.records[agent]], dtype=bool)

    def efe(self, agent: str) -> np.ndarray:
        return np.array([r.efe for r in self.records[agent]])

    def planning_ms(self, agent: str) -> np.ndarray:
        return np.array([r.planning_ms for r in self.records[agent]])

    def deterministic_view(self) -> str:
        """Canonical serialisation without wall-clock fields, for equality checks."""
        doc = {
            "config": asdict(self.config),
            "seed": self.seed,
            "events": [list(e) for e in self.events],
            "initial": dict(self.initial),
            "records": {
                a: [
                    {k: v for k, v in asdict(r).items() if k != "planning_ms"}
                    for r in recs
                ]
                for a, recs in self.records.items()
            },
        }
        return json.dumps(doc, sort_keys=True)


def _profiles_for(config: ExperimentConfig) -> dict[str, DeviceProfile]:
    if config.backend == "trace":
        profiles = {p.name: p for p in ingest_traces(config.trace_path)}
    else:
        profiles = default_profiles()
    if config.profile_path:
        profiles.update({p.name: p for p in load_profiles_json(config.profile_path)})
    return profiles


def resolve_profiles(config: ExperimentConfig, profiles: Mapping[str, DeviceProfile]):
    """Pick the active profile per service and the switch target."""
    names = sorted(profiles)
    if config.backend == "synthetic":
        defaults = {"producer": "edge-6.8W", "worker": "edge-6.8W", "consumer": "consumer-6.8W"}
    else:
        defaults = {s: names[0] for s in AGENT_NAMES}
    active = {
        "producer": config.producer_profile or defaults["producer"],
        "worker": config.worker_profile or defaults["worker"],
        "consumer": config.consumer_profile or defaults["consumer"],
    }
    target = config.switch_profile
    extra = {}
    if config.is_switch and target is None:
        base = profiles[active[config.switch_service]]
        shifted = base.with_power_offset(config.switch_power_offset)
        extra[shifted.name] = shifted
        target = shifted.name
    return active, target, extra


def build_agents(config: ExperimentConfig) -> dict[str, AgentSpec]:
    specs = {name: build_agent(name) for name in AGENT_NAMES}
    if config.learning:
        specs = {n: make_learning_variant(s, config.prior_count) for n, s in specs.items()}
    return specs


def run_episode(config: ExperimentConfig, seed: int, profiles: Mapping[str, DeviceProfile] | None = None) -> RunResult:
    """One episode of plan -> act jointly -> observe -> infer/learn, ``config.steps`` times."""
    profiles = dict(profiles if profiles is not None else _profiles_for(config))
    active, target, extra = resolve_profiles(config, profiles)
    profiles.update(extra)
    env = PipelineEnv(profiles, noise=config.noise, request_mode=config.request_mode, deadline_ms=config.deadline_ms)

    env_seq, agent_seq = np.random.SeedSequence(seed).spawn(2)
    env_rng = np.random.default_rng(env_seq)
    agent_rngs = [np.random.default_rng(s) for s in agent_seq.spawn(len(AGENT_NAMES))]
    specs = build_agents(config)
    agents = {n: Agent(specs[n], config, r) for n, r in zip(AGENT_NAMES, agent_rngs)}

    state, obs = env.reset(env_rng, active)
    initial = {
        "fps": state.config.fps,
        "resolution": state.config.resolution,
        "gpu": state.gpu_on,
        "worker_comm": state.worker_comm,
        "consumer_comm": state.consumer_comm,
    }
    records: dict[str, list[StepRecord]] = {n: [] for n in AGENT_NAMES}
    events: list[tuple[int, str]] = []
    for name, agent in agents.items():
        agent.observe(obs[name])

    for t in range(1, config.steps + 1):
        if config.is_switch and t == config.switch_step + 1:
            state = env.swap_device(state, config.switch_service, target)
            events.append((config.switch_step, f"swap {config.switch_service} -> {target}"))
        actions, evals, elapsed = {}, {}, {}
        for name, agent in agents.items():
            t0 = time.perf_counter()
            actions[name], evals[name] = agent.plan()
            elapsed[name] = time.perf_counter() - t0
        try:
            state, obs = env.step(state, actions["producer"], actions["worker"], actions["consumer"], env_rng)
        except Exception as exc:
            raise RuntimeError(f"environment failed at step {t}: {exc}") from exc
        for name, agent in agents.items():
            t0 = time.perf_counter()
            prev = agent.belief
            agent.observe(obs[name])
            agent.learn(prev, actions[name])
            elapsed[name] += time.perf_counter() - t0
            ev = evals[name]
            records[name].append(
                StepRecord(
                    observation=dict(obs[name]),
                    action=dict(actions[name]),
                    efe=ev.efe,
                    pragmatic_value=ev.pragmatic_value,
                    info_gain=ev.info_gain,
                    sloids=evaluate_sloids(agent.spec, obs[name]),
                    planning_ms=1000.0 * elapsed[name],
                )
            )
    return RunResult(config, seed, {n: tuple(r) for n, r in records.items()}, tuple(events), initial)


def _run_one(args):
    config, seed = args
    return run_episode(config, seed)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[RunResult]:
    """All repetitions; repetition ``i`` uses seed ``config.seed + i``."""
    seeds = [config.seed + i for i in range(config.repetitions)]
    if jobs <= 1:
        profiles = _profiles_for(config)
        return [run_episode(config, s, profiles) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, [(config, s) for s in seeds]))


# --------------------------------------------------------------------------
# Metrics
# --------------------------------------------------------------------------


def cumulative_rate(flags: Sequence[bool]) -> np.ndarray:
    flags = np.asarray(flags, dtype=float)
    return np.cumsum(flags) / np.arange(1, flags.size + 1)


@dataclass(frozen=True)
class MetricSeries:
    steps: int
    rate_mean: Mapping[tuple[str, str], np.ndarray]
    rate_std: Mapping[tuple[str, str], np.ndarray]
    efe_mean: Mapping[str, np.ndarray]
    efe_std: Mapping[str, np.ndarray]
    planning_ms: Mapping[str, float]
    n_runs: int

    def final_rates(self) -> dict[tuple[str, str], float]:
        return {k: float(v[-1]) for k, v in self.rate_mean.items()}


def aggregate(results: Sequence[RunResult]) -> MetricSeries:
    """Per-step cumulative fulfilment and EFE, mean and population std across runs."""
    if not results:
        raise ValueError("aggregate needs at least one run")
    h = results[0].config_hash
    if any(r.config_hash != h for r in results):
        raise ValueError("cannot aggregate runs with different configurations")
    agents = list(results[0].records)
    rate_mean, rate_std, efe_mean, efe_std, timing = {}, {}, {}, {}, {}
    for a in agents:
        for s in results[0].records[a][0].sloids:
            rates = np.stack([cumulative_rate(r.fulfilled(a, s)) for r in results])
            rate_mean[(a, s)] = rates.mean(axis=0)
            rate_std[(a, s)] = rates.std(axis=0)
        efes = np.stack([r.efe(a) for r in results])
        efe_mean[a] = efes.mean(axis=0)
        efe_std[a] = efes.std(axis=0)
        timing[a] = float(np.mean([r.planning_ms(a).mean() for r in results]))
    return MetricSeries(len(results[0].records[agents[0]]), rate_mean, rate_std, efe_mean, efe_std, timing, len(results))


@dataclass(frozen=True)
class TimingReport:
    per_step_ms: Mapping[str, float]  # condition -> mean ms per step, summed over agents
    ratios: Mapping[str, float]

    def to_dict(self) -> dict:
        return {"per_step_ms": dict(self.per_step_ms), "ratios": dict(self.ratios)}


def timing_study(
    config: ExperimentConfig,
    short_pl: int = 1,
    long_pl: int = 3,
) -> TimingReport:
    """Planning cost of expert vs learning agents at two policy lengths."""
    per_step = {}
    for mode in ("expert", "learning"):
        for pl in (short_pl, long_pl):
            cfg = replace(config, scenario=mode, policy_length=pl)
            runs = run_experiment(cfg)
            ms = np.mean([sum(r.planning_ms(a).mean() for a in AGENT_NAMES) for r in runs])
            per_step[f"{mode}_pl{pl}"] = float(ms)
    ratios = {
        f"learning_over_expert_pl{short_pl}": per_step[f"learning_pl{short_pl}"] / per_step[f"expert_pl{short_pl}"],
        f"learning_over_expert_pl{long_pl}": per_step[f"learning_pl{long_pl}"] / per_step[f"expert_pl{long_pl}"],
        f"expert_pl{long_pl}_over_pl{short_pl}": per_step[f"expert_pl{long_pl}"] / per_step[f"expert_pl{short_pl}"],
        f"learning_pl{long_pl}_over_pl{short_pl}": per_step[f"learning_pl{long_pl}"] / per_step[f"learning_pl{short_pl}"],
    }
    return TimingReport(per_step, ratios)


# --------------------------------------------------------------------------
# Artifacts
# --------------------------------------------------------------------------

RUN_COLUMNS = (
    "scenario",
    "policy_length",
    "seed",
    "repetition",
    "step",
    "agent",
    "sloid",
    "fulfilled",
    "cumulative_rate",
    "efe",
    "pragmatic_value",
    "info_gain",
    "action",
    "observation",
)
METRIC_COLUMNS = ("step", "agent", "sloid", "rate_mean", "rate_std", "efe_mean", "efe_std")


def _fmt(x: float) -> str:
    return repr(float(x))


def _pairs(d: Mapping[str, str]) -> str:
    return ";".join(f"{k}={v}" for k, v in d.items())


def runs_to_csv(results: Sequence[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_COLUMNS)
    for rep, r in enumerate(results):
        for agent, recs in r.records.items():
            sloids = list(recs[0].sloids)
            rates = {s: cumulative_rate(r.fulfilled(agent, s)) for s in sloids}
            for t, rec in enumerate(recs, start=1):
                for s in sloids:
                    w.writerow([
                        r.config.scenario, r.config.policy_length, r.seed, rep, t, agent, s,
                        int(rec.sloids[s]), _fmt(rates[s][t - 1]), _fmt(rec.efe),
                        _fmt(rec.pragmatic_value), _fmt(rec.info_gain),
                        _pairs(rec.action), _pairs(rec.observation),
                    ])
    return buf.getvalue()


def metrics_to_csv(m: MetricSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for (agent, sloid), mean in m.rate_mean.items():
        std = m.rate_std[(agent, sloid)]
        for t in range(m.steps):
            w.writerow([t + 1, agent, sloid, _fmt(mean[t]), _fmt(std[t]), _fmt(m.efe_mean[agent][t]), _fmt(m.efe_std[agent][t])])
    return buf.getvalue()


def read_runs_csv(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        if tuple(row) != RUN_COLUMNS:
            raise ValueError(f"unexpected columns {list(row)}")
        row = dict(row)
        for k in ("policy_length", "seed", "repetition", "step", "fulfilled"):
            row[k] = int(row[k])
        for k in ("cumulative_rate", "efe", "pragmatic_value", "info_gain"):
            row[k] = float(row[k])
        rows.append(row)
    return rows


def read_metrics_csv(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        if tuple(row) != METRIC_COLUMNS:
            raise ValueError(f"unexpected columns {list(row)}")
        rows.append({
            "step": int(row["step"]),
            "agent": row["agent"],
            "sloid": row["sloid"],
            **{k: float(row[k]) for k in METRIC_COLUMNS[3:]},
        })
    return rows


def summary(config: ExperimentConfig, results: Sequence[RunResult], metrics: MetricSeries) -> dict:
    final = {}
    for (agent, sloid), v in metrics.final_rates().items():
        final.setdefault(agent, {})[sloid] = {
            "mean": round(v, 12),
            "std": round(float(metrics.rate_std[(agent, sloid)][-1]), 12),
        }
    return {
        "config": asdict(config),
        "config_hash": config.config_hash(),
        "seeds": [r.seed for r in results],
        "events": sorted({e for r in results for e in r.events}),
        "final_rates": final,
    }


def artifact_stem(config: ExperimentConfig) -> str:
    return f"{config.scenario}_{config.policy_length}_{config.seed}"


def write_artifacts(out_dir: str | Path, config: ExperimentConfig, results: Sequence[RunResult], metrics: MetricSeries) -> dict[str, Path]:
    """Write deterministic artifacts plus a separate wall-clock timing file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = artifact_stem(config)
    paths = {
        "runs": out / f"{stem}.csv",
        "metrics": out / f"{stem}_metrics.csv",
        "summary": out / f"{stem}.json",
        "timing": out / f"{stem}_timing.json",
    }
    _write(paths["runs"], runs_to_csv(results))
    _write(paths["metrics"], metrics_to_csv(metrics))
    _write(paths["summary"], json.dumps(summary(config, results, metrics), indent=2, sort_keys=True) + "\n")
    _write(paths["timing"], json.dumps({"planning_ms_per_step": metrics.planning_ms}, indent=2, sort_keys=True) + "\n")
    return paths


def _write(path: Path, text: str) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
