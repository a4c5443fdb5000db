"""Producer, Worker and Consumer generative models and their SLOiDs.

Each builder returns an :class:`AgentSpec` whose CPTs are generated from the
expert rule tables below. Ordinal factors list their labels from the lowest
level to the highest, so ``next`` means one index up and ``prev`` one down.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .inference import (
    BeliefState,
    ControlSpace,
    DirichletCounts,
    FactorSpace,
    ModelError,
    normalize_counts,
    PreferenceModel,
    TransitionFactorModel,
    TransitionModel,
    validate_model,
)

REQUEST = ("Increase", "Stay", "Decrease")
CHANGE = ("Increase", "Stay", "Decrease")
FPS_LADDER = ("12", "16", "20", "26", "30")
RESOLUTION_LADDER = ("120p", "180p", "240p", "360p", "480p", "720p")
BOOL = ("False", "True")
GPU_STATES = ("Off", "On")
EXEC_TIME = ("LOW", "MID-LOW", "MID", "MID-HIGH", "HIGH")
CONSUMPTION = ("LOW", "MID", "HIGH")
SMOOTHNESS = ("SHORT", "MID-SHORT", "MID", "MID-LONG", "LONG")
SWITCH_GPU = ("Switch on", "Switch off", "Stay")
TOGGLE_COMM = ("Enable", "Disable", "Stay")

AGENT_NAMES = ("producer", "worker", "consumer")


@dataclass(frozen=True)
class SLOiDSpec:
    """A service-level objective over one modality: fulfilled iff the label is accepted."""

    name: str
    modality: str
    accepted: frozenset[str]

    @classmethod
    def equals(cls, name: str, modality: str, label: str) -> "SLOiDSpec":
        return cls(name, modality, frozenset([label]))

    @classmethod
    def at_most(cls, name: str, modality: str, labels: Sequence[str], bound: str) -> "SLOiDSpec":
        return cls(name, modality, frozenset(labels[: labels.index(bound) + 1]))

    def fulfilled(self, label: str) -> bool:
        return label in self.accepted


@dataclass(frozen=True, eq=False)
class AgentSpec:
    name: str
    model: TransitionModel
    preferences: PreferenceModel
    prior: BeliefState
    sloids: tuple[SLOiDSpec, ...]
    counts: DirichletCounts | None = field(default=None)

    @property
    def factors(self) -> FactorSpace:
        return self.model.factors

    @property
    def controls(self) -> ControlSpace:
        return self.model.controls

    @property
    def learning(self) -> bool:
        return self.counts is not None


# --------------------------------------------------------------------------
# CPT construction
# --------------------------------------------------------------------------


def _step(index: int, delta: int, n: int) -> int:
    return min(max(index + delta, 0), n - 1)


def build_cpt(
    factors: FactorSpace,
    controls: ControlSpace,
    child: str,
    state_parents: Sequence[str],
    control_parents: Sequence[str],
    rule: Callable[..., str],
) -> TransitionFactorModel:
    """Tabulate a deterministic rule ``rule(**parent_labels) -> child_label`` into a CPT.

    Parent labels are passed as keyword arguments with spaces and dashes
    replaced by underscores.
    """
    axes = [(p, factors.labels(p)) for p in state_parents] + [(c, controls.labels(c)) for c in control_parents]
    child_labels = factors.labels(child)
    shape = (len(child_labels),) + tuple(len(labels) for _, labels in axes)
    cpt = np.zeros(shape)
    keys = [_kw(name) for name, _ in axes]
    for combo in itertools.product(*(range(len(labels)) for _, labels in axes)):
        kwargs = {k: labels[i] for k, (_, labels), i in zip(keys, axes, combo)}
        cpt[(child_labels.index(rule(**kwargs)),) + combo] = 1.0
    return TransitionFactorModel(child, tuple(state_parents), tuple(control_parents), cpt)


def _kw(name: str) -> str:
    return name.replace("-", "_").replace(" ", "_")


def _ladder_rule(labels: Sequence[str], own: str, action: str, up: str, down: str):
    def rule(**kw):
        i = labels.index(kw[own])
        a = kw[action]
        if a == up:
            return labels[_step(i, 1, len(labels))]
        if a == down:
            return labels[_step(i, -1, len(labels))]
        return labels[i]

    return rule


def _request_rule(own: str, level: str, ladder: Sequence[str], action: str):
    """Producer request-satisfaction dynamics (WF, CF, CR)."""

    def rule(**kw):
        current = kw[own]
        a = kw[action]
        i = ladder.index(kw[level])
        if a == "Stay":
            return current
        if (a == "Increase" and i == len(ladder) - 1) or (a == "Decrease" and i == 0):
            return current
        if a == "Increase":
            return "Stay" if current == "Increase" else "Decrease"
        return "Stay" if current == "Decrease" else "Increase"

    return rule


def _set_rule(own: str, action: str, on: str, off: str, labels=BOOL):
    def rule(**kw):
        a = kw[action]
        if a == on:
            return labels[1]
        if a == off:
            return labels[0]
        return kw[own]

    return rule


def _effect(state_on: bool, action: str, on: str, off: str) -> int:
    """+1 if the action effectively activates, -1 if it effectively deactivates, else 0."""
    if action == on and not state_on:
        return 1
    if action == off and state_on:
        return -1
    return 0


# --------------------------------------------------------------------------
# Producer
# --------------------------------------------------------------------------


def build_producer() -> AgentSpec:
    factors = FactorSpace(
        [
            ("WF", REQUEST),
            ("CF", REQUEST),
            ("CR", REQUEST),
            ("FPS", FPS_LADDER),
            ("Resolution", RESOLUTION_LADDER),
        ]
    )
    controls = ControlSpace([("Change_FPS", CHANGE), ("Change_resolution", CHANGE)])
    cpts = [
        build_cpt(factors, controls, "WF", ["WF", "FPS"], ["Change_FPS"], _request_rule("WF", "FPS", FPS_LADDER, "Change_FPS")),
        build_cpt(factors, controls, "CF", ["CF", "FPS"], ["Change_FPS"], _request_rule("CF", "FPS", FPS_LADDER, "Change_FPS")),
        build_cpt(
            factors,
            controls,
            "CR",
            ["CR", "Resolution"],
            ["Change_resolution"],
            _request_rule("CR", "Resolution", RESOLUTION_LADDER, "Change_resolution"),
        ),
        build_cpt(factors, controls, "FPS", ["FPS"], ["Change_FPS"], _ladder_rule(FPS_LADDER, "FPS", "Change_FPS", "Increase", "Decrease")),
        build_cpt(
            factors,
            controls,
            "Resolution",
            ["Resolution"],
            ["Change_resolution"],
            _ladder_rule(RESOLUTION_LADDER, "Resolution", "Change_resolution", "Increase", "Decrease"),
        ),
    ]
    # Vectors follow REQUEST order (Increase, Stay, Decrease).
    prefs = PreferenceModel(
        {
            "WF": [0.25, 1.5, 0.25],
            "CF": [0.5, 3.0, 0.5],
            "CR": [0.5, 3.0, 0.5],
            "FPS": np.zeros(len(FPS_LADDER)),
            "Resolution": np.zeros(len(RESOLUTION_LADDER)),
        }
    )
    sloids = (
        SLOiDSpec.equals("WF", "WF", "Stay"),
        SLOiDSpec.equals("CF", "CF", "Stay"),
        SLOiDSpec.equals("CR", "CR", "Stay"),
    )
    model = TransitionModel(factors, controls, tuple(cpts))
    return AgentSpec("producer", model, prefs, BeliefState.uniform(factors), sloids)


# --------------------------------------------------------------------------
# Worker
# --------------------------------------------------------------------------


def _worker_consumption(**kw) -> str:
    i = CONSUMPTION.index(kw["W_consumption"])
    comm = _effect(kw["ShareInfo"] == "True", kw["Toggle_comm"], "Enable", "Disable")
    gpu = _effect(kw["GPU"] == "On", kw["Switch_GPU"], "Switch on", "Switch off")
    if comm == 1 and gpu == -1 or comm == -1 and gpu == 1:
        delta = 0
    elif comm == 1 or gpu == 1:
        delta = 1
    elif comm == -1 or gpu == -1:
        delta = -1
    else:
        delta = 0
    return CONSUMPTION[_step(i, delta, len(CONSUMPTION))]


def _worker_exec_time(**kw) -> str:
    i = EXEC_TIME.index(kw["ExecTime"])
    delta = -_effect(kw["GPU"] == "On", kw["Switch_GPU"], "Switch on", "Switch off")
    return EXEC_TIME[_step(i, delta, len(EXEC_TIME))]


def _worker_latency(**kw) -> str:
    return "True" if kw["Toggle_comm"] == "Enable" else kw["Latency"]


def _worker_fps(**kw) -> str:
    i = FPS_LADDER.index(kw["FPS"])
    return FPS_LADDER[_step(i, -1, len(FPS_LADDER))] if kw["Toggle_comm"] == "Enable" else kw["FPS"]


def build_worker() -> AgentSpec:
    factors = FactorSpace(
        [
            ("Latency", BOOL),
            ("ExecTime", EXEC_TIME),
            ("FPS", FPS_LADDER),
            ("W-consumption", CONSUMPTION),
            ("ShareInfo", BOOL),
            ("GPU", GPU_STATES),
        ]
    )
    controls = ControlSpace([("Switch_GPU", SWITCH_GPU), ("Toggle_comm", TOGGLE_COMM)])
    cpts = [
        build_cpt(factors, controls, "Latency", ["Latency"], ["Toggle_comm"], _worker_latency),
        build_cpt(factors, controls, "ExecTime", ["ExecTime", "GPU"], ["Switch_GPU"], _worker_exec_time),
        build_cpt(factors, controls, "FPS", ["FPS"], ["Toggle_comm"], _worker_fps),
        build_cpt(
            factors,
            controls,
            "W-consumption",
            ["W-consumption", "ShareInfo", "GPU"],
            ["Toggle_comm", "Switch_GPU"],
            _worker_consumption,
        ),
        build_cpt(factors, controls, "ShareInfo", ["ShareInfo"], ["Toggle_comm"], _set_rule("ShareInfo", "Toggle_comm", "Enable", "Disable")),
        build_cpt(factors, controls, "GPU", ["GPU"], ["Switch_GPU"], _set_rule("GPU", "Switch_GPU", "Switch on", "Switch off", GPU_STATES)),
    ]
    prefs = PreferenceModel(
        {
            "Latency": [0.1, 3.0],
            "ExecTime": [3.0, 2.5, 2.0, 0.25, 0.1],
            "FPS": np.zeros(len(FPS_LADDER)),
            "W-consumption": [3.0, 2.5, 0.5],
            "ShareInfo": np.zeros(2),
            "GPU": np.zeros(2),
        }
    )
    sloids = (
        SLOiDSpec.equals("Latency", "Latency", "True"),
        SLOiDSpec.at_most("W-consumption", "W-consumption", CONSUMPTION, "MID"),
    )
    model = TransitionModel(factors, controls, tuple(cpts))
    return AgentSpec("worker", model, prefs, BeliefState.uniform(factors), sloids)


# --------------------------------------------------------------------------
# Consumer
# --------------------------------------------------------------------------


def _consumer_consumption(**kw) -> str:
    i = CONSUMPTION.index(kw["C_consumption"])
    delta = _effect(kw["ShareInfo"] == "True", kw["Toggle_comm"], "Enable", "Disable")
    return CONSUMPTION[_step(i, delta, len(CONSUMPTION))]


def build_consumer() -> AgentSpec:
    factors = FactorSpace(
        [
            ("Success", BOOL),
            ("Smoothness", SMOOTHNESS),
            ("C-consumption", CONSUMPTION),
            ("FPS", FPS_LADDER),
            ("Resolution", RESOLUTION_LADDER),
            ("ShareInfo", BOOL),
        ]
    )
    controls = ControlSpace([("Toggle_comm", TOGGLE_COMM)])
    cpts = [
        build_cpt(
            factors,
            controls,
            "Success",
            ["Success", "Resolution"],
            ["Toggle_comm"],
            lambda **kw: "True" if kw["Toggle_comm"] == "Enable" else kw["Success"],
        ),
        build_cpt(
            factors,
            controls,
            "Smoothness",
            ["Smoothness", "FPS"],
            ["Toggle_comm"],
            # Enabling is expected to restore the best smoothness bin.
            lambda **kw: SMOOTHNESS[0] if kw["Toggle_comm"] == "Enable" else kw["Smoothness"],
        ),
        build_cpt(factors, controls, "C-consumption", ["C-consumption", "ShareInfo"], ["Toggle_comm"], _consumer_consumption),
        build_cpt(factors, controls, "FPS", ["FPS"], ["Toggle_comm"], _ladder_rule(FPS_LADDER, "FPS", "Toggle_comm", "Enable", None)),
        build_cpt(
            factors,
            controls,
            "Resolution",
            ["Resolution"],
            ["Toggle_comm"],
            _ladder_rule(RESOLUTION_LADDER, "Resolution", "Toggle_comm", "Enable", None),
        ),
        build_cpt(factors, controls, "ShareInfo", ["ShareInfo"], ["Toggle_comm"], _set_rule("ShareInfo", "Toggle_comm", "Enable", "Disable")),
    ]
    prefs = PreferenceModel(
        {
            "Success": [0.25, 3.0],
            "Smoothness": [3.0, 2.5, 2.0, 0.5, 0.1],
            "C-consumption": [3.0, 2.5, 0.5],
            "FPS": np.zeros(len(FPS_LADDER)),
            "Resolution": np.zeros(len(RESOLUTION_LADDER)),
            "ShareInfo": np.zeros(2),
        }
    )
    sloids = (
        SLOiDSpec.equals("Success", "Success", "True"),
        SLOiDSpec.at_most("Smoothness", "Smoothness", SMOOTHNESS, "MID"),
        SLOiDSpec.at_most("C-consumption", "C-consumption", CONSUMPTION, "MID"),
    )
    model = TransitionModel(factors, controls, tuple(cpts))
    return AgentSpec("consumer", model, prefs, BeliefState.uniform(factors), sloids)


BUILDERS: dict[str, Callable[[], AgentSpec]] = {
    "producer": build_producer,
    "worker": build_worker,
    "consumer": build_consumer,
}


def build_agent(name: str) -> AgentSpec:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise ModelError(f"unknown agent {name!r}; expected one of {list(BUILDERS)}") from None


# --------------------------------------------------------------------------
# SLOiDs, learning variants, validation, dumps
# --------------------------------------------------------------------------


def evaluate_sloids(spec: AgentSpec, observation: Mapping[str, str]) -> dict[str, bool]:
    out = {}
    for s in spec.sloids:
        if s.modality not in observation:
            raise ModelError(f"observation lacks modality {s.modality!r} needed by SLOiD {s.name!r}")
        label = observation[s.modality]
        spec.factors.label_index(s.modality, label)
        out[s.name] = s.fulfilled(label)
    return out


def make_learning_variant(spec: AgentSpec, prior_count: float = 1.0) -> AgentSpec:
    """Same DBN structure, CPTs replaced by uniform Dirichlet counts."""
    counts = DirichletCounts.uniform(spec.model, prior_count)
    return AgentSpec(spec.name, normalize_counts(counts), spec.preferences, spec.prior, spec.sloids, counts)


def validate_spec(spec: AgentSpec) -> dict[str, list[str]]:
    """Per-check violations for CPTs, preferences, prior and SLOiDs."""
    report: dict[str, list[str]] = {}
    violations = validate_model(spec.model)
    for m in spec.model.cpts:
        report[f"B[{m.child}]"] = [p for p in violations if p.startswith(f"{m.child}:")]
    try:
        spec.preferences.aligned(spec.factors)
        report["C"] = []
    except ModelError as exc:
        report["C"] = [str(exc)]
    prior_problems = []
    for name, q in zip(spec.factors.names, spec.prior.marginals):
        if abs(q.sum() - 1) > 1e-9 or np.any(q < 0):
            prior_problems.append(f"prior over {name} is not a categorical")
    report["D"] = prior_problems
    sloid_problems = []
    for s in spec.sloids:
        labels = spec.factors.labels(s.modality)
        hits = sum(s.fulfilled(l) for l in labels)
        if hits == 0 or hits == len(labels):
            sloid_problems.append(f"SLOiD {s.name} is vacuous over {labels}")
    report["SLOiDs"] = sloid_problems
    return report


def spec_to_dict(spec: AgentSpec) -> dict:
    model = spec.model
    return {
        "name": spec.name,
        "factors": [{"name": n, "labels": list(ls)} for n, ls in model.factors],
        "controls": [{"name": n, "labels": list(ls)} for n, ls in model.controls],
        "transitions": [
            {
                "child": m.child,
                "state_parents": list(m.state_parents),
                "control_parents": list(m.control_parents),
                "axes": ["next " + m.child, *m.state_parents, *m.control_parents],
                "cpt": m.cpt.tolist(),
            }
            for m in model.cpts
        ],
        "preferences": {n: spec.preferences[n].tolist() for n in model.factors.names},
        "prior": {n: q.tolist() for n, q in zip(model.factors.names, spec.prior.marginals)},
        "sloids": [{"name": s.name, "modality": s.modality, "accepted": sorted(s.accepted)} for s in spec.sloids],
        "learning": spec.learning,
    }


def dump_spec(spec: AgentSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"
