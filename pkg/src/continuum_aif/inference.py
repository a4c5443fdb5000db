"""Discrete active-inference machinery over factored state spaces.

Beliefs are products of per-factor categorical marginals. Transition models
are DBN-structured: every state factor owns one conditional probability
table (CPT) whose axes are ``(child, *state_parents, *control_parents)``.
Observations are assumed to be an identity mapping of the state, so state
inference reduces to placing a delta on the observed label.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

TOL = 1e-9
# Guard against log(0) when computing entropies of deterministic predictions.
_EPS = 1e-300


class ModelError(ValueError):
    """Raised when a model, belief or observation is inconsistent."""


# --------------------------------------------------------------------------
# Categorical helpers
# --------------------------------------------------------------------------


def categorical(probs: Sequence[float] | np.ndarray, *, atol: float = TOL) -> np.ndarray:
    """Validate ``probs`` as a probability vector and return a read-only copy."""
    arr = np.array(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ModelError("categorical must be a non-empty vector")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ModelError(f"categorical has negative or non-finite entries: {arr}")
    if abs(arr.sum() - 1.0) > atol:
        raise ModelError(f"categorical sums to {arr.sum()!r}, not 1")
    arr.setflags(write=False)
    return arr


def uniform(n: int) -> np.ndarray:
    return categorical(np.full(n, 1.0 / n))


def onehot(index: int, n: int) -> np.ndarray:
    arr = np.zeros(n)
    arr[index] = 1.0
    arr.setflags(write=False)
    return arr


def entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    return float(-np.sum(p * np.log(np.maximum(p, _EPS))))


# --------------------------------------------------------------------------
# Spaces
# --------------------------------------------------------------------------


class _LabelledSpace:
    """Ordered collection of named axes, each with an ordered label list."""

    _kind = "axis"

    def __init__(self, items: Sequence[tuple[str, Sequence[str]]]):
        names = [name for name, _ in items]
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate {self._kind} names in {names}")
        self._items = tuple((name, tuple(labels)) for name, labels in items)
        self._index = {name: i for i, name in enumerate(names)}
        for name, labels in self._items:
            if not labels:
                raise ModelError(f"{self._kind} {name!r} has no labels")
            if len(set(labels)) != len(labels):
                raise ModelError(f"{self._kind} {name!r} has duplicate labels")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self._items)

    @property
    def cards(self) -> tuple[int, ...]:
        return tuple(len(labels) for _, labels in self._items)

    def labels(self, name: str) -> tuple[str, ...]:
        return self._items[self.index(name)][1]

    def card(self, name: str) -> int:
        return len(self.labels(name))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ModelError(f"unknown {self._kind} {name!r}") from None

    def label_index(self, name: str, label: str) -> int:
        labels = self.labels(name)
        try:
            return labels.index(label)
        except ValueError:
            raise ModelError(
                f"label {label!r} is not valid for {self._kind} {name!r}; expected one of {list(labels)}"
            ) from None

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self._items)!r})"


class FactorSpace(_LabelledSpace):
    """State factors. Label order defines the Increase/Decrease neighbours."""

    _kind = "factor"

    def __init__(self, items: Sequence[tuple[str, Sequence[str]]]):
        super().__init__(items)
        for name, labels in self._items:
            if len(labels) < 2:
                raise ModelError(f"factor {name!r} needs at least two labels")


class ControlSpace(_LabelledSpace):
    _kind = "control"

    @property
    def n_joint(self) -> int:
        return int(np.prod(self.cards))

    def joint_index(self, action: Mapping[str, str] | Sequence[int]) -> int:
        """Lexicographic index of a joint action (first control most significant)."""
        return int(np.ravel_multi_index(self.action_indices(action), self.cards))

    def action_indices(self, action: Mapping[str, str] | Sequence[int]) -> tuple[int, ...]:
        if isinstance(action, Mapping):
            missing = set(self.names) - set(action)
            if missing:
                raise ModelError(f"joint action does not cover controls {sorted(missing)}")
            extra = set(action) - set(self.names)
            if extra:
                raise ModelError(f"joint action names unknown controls {sorted(extra)}")
            return tuple(self.label_index(name, action[name]) for name in self.names)
        idx = tuple(int(i) for i in action)
        if len(idx) != len(self) or any(not 0 <= i < c for i, c in zip(idx, self.cards)):
            raise ModelError(f"joint action {idx} does not fit controls {self.cards}")
        return idx

    def joint_from_index(self, j: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(j, self.cards))

    def joint_labels(self, action: Mapping[str, str] | Sequence[int]) -> dict[str, str]:
        idx = self.action_indices(action)
        return {name: self.labels(name)[i] for name, i in zip(self.names, idx)}

    def joint_actions(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(c) for c in self.cards)))


# --------------------------------------------------------------------------
# Transition model
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TransitionFactorModel:
    """CPT of one child factor, axes ``(child, *state_parents, *control_parents)``."""

    child: str
    state_parents: tuple[str, ...]
    control_parents: tuple[str, ...]
    cpt: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "state_parents", tuple(self.state_parents))
        object.__setattr__(self, "control_parents", tuple(self.control_parents))
        cpt = np.array(self.cpt, dtype=float)
        cpt.setflags(write=False)
        object.__setattr__(self, "cpt", cpt)
        if len(set(self.state_parents)) != len(self.state_parents):
            raise ModelError(f"{self.child}: repeated state parent")
        if len(set(self.control_parents)) != len(self.control_parents):
            raise ModelError(f"{self.child}: repeated control parent")
        if cpt.ndim != 1 + len(self.state_parents) + len(self.control_parents):
            raise ModelError(
                f"{self.child}: CPT has {cpt.ndim} axes but declares "
                f"{len(self.state_parents)} state and {len(self.control_parents)} control parents"
            )

    def column(self, states: Mapping[str, int], actions: Mapping[str, int]) -> np.ndarray:
        idx = tuple(states[p] for p in self.state_parents) + tuple(actions[c] for c in self.control_parents)
        return self.cpt[(slice(None),) + idx]

    def is_deterministic(self) -> bool:
        return bool(np.all((self.cpt == 0.0) | (self.cpt == 1.0)))


@dataclass(frozen=True, eq=False)
class TransitionModel:
    """The full factored B: one :class:`TransitionFactorModel` per state factor."""

    factors: FactorSpace
    controls: ControlSpace
    cpts: tuple[TransitionFactorModel, ...]

    def __post_init__(self):
        object.__setattr__(self, "cpts", tuple(self.cpts))
        children = [m.child for m in self.cpts]
        if children != list(self.factors.names):
            raise ModelError(
                f"transition models must cover factors {list(self.factors.names)} in order, got {children}"
            )
        for m in self.cpts:
            expected = (
                (self.factors.card(m.child),)
                + tuple(self.factors.card(p) for p in m.state_parents)
                + tuple(self.controls.card(c) for c in m.control_parents)
            )
            if m.cpt.shape != expected:
                raise ModelError(f"{m.child}: CPT shape {m.cpt.shape} does not match parents {expected}")

    def __getitem__(self, child: str) -> TransitionFactorModel:
        return self.cpts[self.factors.index(child)]

    def with_cpts(self, cpts: Sequence[np.ndarray]) -> "TransitionModel":
        return TransitionModel(
            self.factors,
            self.controls,
            tuple(
                TransitionFactorModel(m.child, m.state_parents, m.control_parents, c)
                for m, c in zip(self.cpts, cpts)
            ),
        )

    def is_deterministic(self) -> bool:
        return self._argmax_tables is not None

    @cached_property
    def _argmax_tables(self) -> tuple[np.ndarray, ...] | None:
        # cached on the (immutable) model; None unless every CPT is 0/1
        if not all(m.is_deterministic() for m in self.cpts):
            return None
        return tuple(np.argmax(m.cpt, axis=0) for m in self.cpts)


def validate_model(model: TransitionModel, atol: float = TOL) -> list[str]:
    """Return a list of violations; empty means every CPT column is a valid categorical."""
    problems = []
    for m in model.cpts:
        cpt = m.cpt
        if np.any(cpt < 0):
            problems.append(f"{m.child}: negative probability")
        if not np.all(np.isfinite(cpt)):
            problems.append(f"{m.child}: non-finite probability")
        sums = cpt.sum(axis=0)
        bad = np.argwhere(np.abs(sums - 1.0) > atol)
        for idx in bad:
            problems.append(f"{m.child}: column {tuple(int(i) for i in idx)} sums to {sums[tuple(idx)]:.6g}")
    return problems


# --------------------------------------------------------------------------
# Beliefs, preferences, policies
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BeliefState:
    factors: FactorSpace
    marginals: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.marginals) != len(self.factors):
            raise ModelError("belief must hold one marginal per factor")
        ms = []
        for (name, labels), q in zip(self.factors, self.marginals):
            q = categorical(q, atol=1e-8)
            if q.size != len(labels):
                raise ModelError(f"belief over {name!r} has {q.size} entries, expected {len(labels)}")
            ms.append(q)
        object.__setattr__(self, "marginals", tuple(ms))

    def __getitem__(self, name: str) -> np.ndarray:
        return self.marginals[self.factors.index(name)]

    @classmethod
    def uniform(cls, factors: FactorSpace) -> "BeliefState":
        return cls(factors, tuple(uniform(c) for c in factors.cards))

    def is_delta(self) -> bool:
        return all(np.max(q) == 1.0 for q in self.marginals)

    def argmax(self) -> tuple[int, ...]:
        return tuple(int(np.argmax(q)) for q in self.marginals)


@dataclass(frozen=True, eq=False)
class PreferenceModel:
    """Per-modality log-preferences (unnormalised)."""

    vectors: Mapping[str, np.ndarray]

    def __post_init__(self):
        vecs = {}
        for name, v in self.vectors.items():
            arr = np.array(v, dtype=float)
            arr.setflags(write=False)
            vecs[name] = arr
        object.__setattr__(self, "vectors", vecs)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.vectors[name]

    def aligned(self, factors: FactorSpace) -> tuple[np.ndarray, ...]:
        out = []
        for name, labels in factors:
            if name not in self.vectors:
                raise ModelError(f"no preference vector for modality {name!r}")
            v = self.vectors[name]
            if v.shape != (len(labels),):
                raise ModelError(f"preference vector for {name!r} has shape {v.shape}, expected ({len(labels)},)")
            out.append(v)
        return tuple(out)

    def shifted(self, name: str, amount: float) -> "PreferenceModel":
        vecs = dict(self.vectors)
        vecs[name] = vecs[name] + amount
        return PreferenceModel(vecs)


Policy = tuple[tuple[int, ...], ...]
"""A policy is a sequence of joint actions, each a tuple of per-control indices."""


def enumerate_policies(controls: ControlSpace, pl: int) -> list[Policy]:
    """All ``|U|**pl`` policies in lexicographic order (first step most significant)."""
    if pl < 1:
        raise ModelError("policy_length must be >= 1")
    joints = controls.joint_actions()
    return [tuple(p) for p in itertools.product(joints, repeat=pl)]


# --------------------------------------------------------------------------
# Inference and prediction
# --------------------------------------------------------------------------


def infer_state(observation: Mapping[str, str], factors: FactorSpace) -> BeliefState:
    """Posterior over states under an identity likelihood: a delta per factor."""
    missing = [name for name in factors.names if name not in observation]
    if missing:
        raise ModelError(f"observation lacks modalities {missing}")
    marginals = []
    for name, labels in factors:
        label = observation[name]
        if label not in labels:
            raise ModelError(f"model mismatch: label {label!r} is not valid for modality {name!r}")
        marginals.append(onehot(labels.index(label), len(labels)))
    return BeliefState(factors, tuple(marginals))


_LETTERS = string.ascii_letters


def _factor_einsum(m: TransitionFactorModel, n_ctrl_axes: int) -> str:
    """Subscripts contracting a CPT with the batched marginals of its state parents."""
    child = _LETTERS[0]
    batch = _LETTERS[1]
    sp = _LETTERS[2 : 2 + len(m.state_parents)]
    cp = _LETTERS[2 + len(m.state_parents) : 2 + len(m.state_parents) + n_ctrl_axes]
    ins = [child + sp + cp] + [batch + s for s in sp]
    return ",".join(ins) + "->" + batch + child + cp


def _propagate(
    cpt: np.ndarray,
    m: TransitionFactorModel,
    parent_marginals: Sequence[np.ndarray],
) -> np.ndarray:
    """Mean-field propagation for a batch.

    ``parent_marginals`` are ``(B, n_parent)`` arrays. Returns ``(B, n_child, *control_cards)``.
    """
    subs = _factor_einsum(m, len(m.control_parents))
    return np.einsum(subs, cpt, *parent_marginals, optimize=len(parent_marginals) > 2)


def predict(
    belief: BeliefState,
    joint_action: Mapping[str, str] | Sequence[int],
    model: TransitionModel,
) -> BeliefState:
    """One-step prediction: each child marginal is its CPT column averaged over the
    product of its parents' marginals."""
    if belief.factors != model.factors:
        raise ModelError("belief and model disagree on the factor space")
    act = dict(zip(model.controls.names, model.controls.action_indices(joint_action)))
    out = []
    for m in model.cpts:
        parents = [belief[p][None, :] for p in m.state_parents]
        full = _propagate(m.cpt, m, parents)[0]
        col = full[(slice(None),) + tuple(act[c] for c in m.control_parents)]
        out.append(col / col.sum())
    return BeliefState(belief.factors, tuple(out))


# --------------------------------------------------------------------------
# Expected free energy
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PolicyEvaluation:
    """EFE terms of one policy (per-step averages over the horizon)."""

    pragmatic_value: float
    info_gain: float
    efe: float


@dataclass(frozen=True, eq=False)
class EFEReport:
    """EFE terms of every enumerated policy plus the selected joint action."""

    pragmatic_value: np.ndarray
    info_gain: np.ndarray
    efe: np.ndarray
    policy_length: int
    n_joint: int
    action: tuple[int, ...] | None = None
    action_posterior: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.efe.size)

    def entry(self, i: int) -> PolicyEvaluation:
        return PolicyEvaluation(float(self.pragmatic_value[i]), float(self.info_gain[i]), float(self.efe[i]))

    @property
    def best_policy(self) -> int:
        return int(np.argmin(self.efe))

    def first_action_index(self, i: int) -> int:
        return i // self.n_joint ** (self.policy_length - 1)


def dirichlet_novelty_weights(counts: np.ndarray) -> np.ndarray:
    """Per-cell weight of the expected parameter information gain (non-negative)."""
    totals = counts.sum(axis=0, keepdims=True)
    return 0.5 * (1.0 / counts - 1.0 / totals)


def expected_free_energy(
    policy: Policy,
    belief: BeliefState,
    model: TransitionModel,
    preferences: PreferenceModel,
    *,
    novelty: Sequence[np.ndarray] | None = None,
) -> PolicyEvaluation:
    """EFE of a single policy, rolled forward one step at a time.

    With an identity likelihood the predicted outcome marginal equals the
    predicted state marginal, and the expected information gain reduces to its
    entropy. Step values are averaged over the policy length.
    """
    prefs = preferences.aligned(model.factors)
    pv = ig = 0.0
    q = belief
    for action in policy:
        nxt = predict(q, action, model)
        for i, marg in enumerate(nxt.marginals):
            pv += float(marg @ prefs[i])
            ig += entropy(marg)
        if novelty is not None:
            ig += _novelty_term(q, nxt, action, model, novelty)
        q = nxt
    pl = len(policy)
    pv /= pl
    ig /= pl
    return PolicyEvaluation(pv, ig, -pv - ig)


def _novelty_term(prev, nxt, action, model, weights) -> float:
    act = dict(zip(model.controls.names, model.controls.action_indices(action)))
    total = 0.0
    for m, w in zip(model.cpts, weights):
        parents = [prev[p][None, :] for p in m.state_parents]
        full = _propagate(w, m, parents)[0]
        col = full[(slice(None),) + tuple(act[c] for c in m.control_parents)]
        total += float(nxt[m.child] @ col)
    return total


def evaluate_policies(
    belief: BeliefState,
    model: TransitionModel,
    preferences: PreferenceModel,
    pl: int,
    *,
    novelty: Sequence[np.ndarray] | None = None,
) -> EFEReport:
    """EFE of every policy of length ``pl``, in :func:`enumerate_policies` order.

    Policies sharing a prefix share its predicted beliefs, so the rollout is
    evaluated once per node of the action tree instead of once per policy.
    Deterministic models under a delta belief take an integer-indexed path.
    """
    if pl < 1:
        raise ModelError("policy_length must be >= 1")
    if belief.factors != model.factors:
        raise ModelError("belief and model disagree on the factor space")
    prefs = preferences.aligned(model.factors)
    if novelty is None and belief.is_delta() and model.is_deterministic():
        step_pv, step_ig = _tree_deterministic(belief, model, prefs, pl)
    else:
        step_pv, step_ig = _tree_dense(belief, model, prefs, pl, novelty)

    J = model.controls.n_joint
    n = J**pl
    pv = np.zeros(n)
    ig = np.zeros(n)
    idx = np.arange(n)
    for d in range(pl):
        ancestor = idx // J ** (pl - 1 - d)
        pv += step_pv[d][ancestor]
        ig += step_ig[d][ancestor]
    pv /= pl
    ig /= pl
    return EFEReport(pv, ig, -pv - ig, pl, J)


def _control_index_arrays(model: TransitionModel) -> dict[str, np.ndarray]:
    joints = np.array(model.controls.joint_actions(), dtype=int).reshape(-1, len(model.controls))
    return {name: joints[:, i] for i, name in enumerate(model.controls.names)}


def _tree_dense(belief, model, prefs, pl, novelty):
    ctrl_idx = _control_index_arrays(model)
    J = model.controls.n_joint
    fidx = {name: i for i, name in enumerate(model.factors.names)}
    level = [q[None, :] for q in belief.marginals]
    step_pv, step_ig = [], []
    for _ in range(pl):
        B = level[0].shape[0]
        nxt = []
        for m in model.cpts:
            parents = [level[fidx[p]] for p in m.state_parents]
            q = _expand(m.cpt, m, parents, ctrl_idx, B, J)
            nxt.append(q / q.sum(axis=1, keepdims=True))
        pv = sum(q @ c for q, c in zip(nxt, prefs))
        ig = -sum(np.sum(q * np.log(np.maximum(q, _EPS)), axis=1) for q in nxt)
        if novelty is not None:
            for m, w, q in zip(model.cpts, novelty, nxt):
                parents = [level[fidx[p]] for p in m.state_parents]
                ig = ig + np.sum(q * _expand(w, m, parents, ctrl_idx, B, J), axis=1)
        step_pv.append(pv)
        step_ig.append(ig)
        level = nxt
    return step_pv, step_ig


def _expand(cpt, m, parents, ctrl_idx, B, J):
    """Propagate a batch of ``B`` beliefs through every joint action -> ``(B*J, n_child)``."""
    full = _propagate(cpt, m, parents)
    if m.control_parents:
        sel = (slice(None), slice(None)) + tuple(ctrl_idx[c] for c in m.control_parents)
        out = full[sel]  # (B, n_child, J)
    else:
        out = np.broadcast_to(full[:, :, None], full.shape + (J,))
    n_child = out.shape[1]
    return np.moveaxis(out, 2, 1).reshape(B * J, n_child)


def _tree_deterministic(belief, model, prefs, pl):
    ctrl_idx = _control_index_arrays(model)
    J = model.controls.n_joint
    fidx = {name: i for i, name in enumerate(model.factors.names)}
    tables = model._argmax_tables
    state = np.array(belief.argmax(), dtype=int)[None, :]
    step_pv, step_ig = [], []
    for _ in range(pl):
        B = state.shape[0]
        rep = np.repeat(state, J, axis=0)
        act = {c: np.tile(ctrl_idx[c], B) for c in ctrl_idx}
        nxt = np.empty_like(rep)
        for i, (m, table) in enumerate(zip(model.cpts, tables)):
            idx = tuple(rep[:, fidx[p]] for p in m.state_parents) + tuple(act[c] for c in m.control_parents)
            nxt[:, i] = table[idx]
        pv = np.zeros(B * J)
        for i, c in enumerate(prefs):
            pv += c[nxt[:, i]]
        step_pv.append(pv)
        step_ig.append(np.zeros(B * J))
        state = nxt
    return step_pv, step_ig


# --------------------------------------------------------------------------
# Action selection
# --------------------------------------------------------------------------


def softmax(x: np.ndarray) -> np.ndarray:
    z = x - np.max(x)
    e = np.exp(z)
    return e / e.sum()


def select_action(
    report: EFEReport,
    precision: float = 16.0,
    *,
    mode: str = "deterministic",
    rng: np.random.Generator | None = None,
) -> tuple[int, np.ndarray]:
    """Pick the first joint action from the policy posterior ``softmax(-precision * efe)``.

    Returns the lexicographic joint-action index and the marginal posterior
    over first actions. Deterministic mode takes the argmax with ties going to
    the lowest index; ``mode="sample"`` draws from the marginal with ``rng``.
    """
    if len(report) == 0:
        raise ModelError("cannot select an action from an empty report")
    if precision <= 0:
        raise ModelError("precision must be positive")
    q_pi = softmax(-precision * report.efe)
    block = report.n_joint ** (report.policy_length - 1)
    marginal = q_pi.reshape(report.n_joint, block).sum(axis=1)
    if mode == "deterministic":
        best = marginal.max()
        j = int(np.flatnonzero(marginal >= best * (1 - 1e-12))[0])
    elif mode == "sample":
        if rng is None:
            raise ModelError("sampling mode needs an rng")
        j = int(rng.choice(marginal.size, p=marginal))
    else:
        raise ModelError(f"unknown selection mode {mode!r}")
    return j, marginal


# --------------------------------------------------------------------------
# Dirichlet learning of B
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DirichletCounts:
    """Pseudo-counts shaped like the CPTs of a :class:`TransitionModel` skeleton."""

    structure: TransitionModel
    counts: tuple[np.ndarray, ...]

    def __post_init__(self):
        arrs = []
        for m, c in zip(self.structure.cpts, self.counts):
            arr = np.array(c, dtype=float)
            if arr.shape != m.cpt.shape:
                raise ModelError(f"{m.child}: counts shape {arr.shape} != CPT shape {m.cpt.shape}")
            if np.any(arr <= 0):
                raise ModelError(f"{m.child}: Dirichlet counts must be strictly positive")
            arr.setflags(write=False)
            arrs.append(arr)
        if len(arrs) != len(self.structure.cpts):
            raise ModelError("one count array per factor is required")
        object.__setattr__(self, "counts", tuple(arrs))

    @classmethod
    def uniform(cls, structure: TransitionModel, prior: float = 1.0) -> "DirichletCounts":
        return cls(structure, tuple(np.full(m.cpt.shape, float(prior)) for m in structure.cpts))

    def __getitem__(self, child: str) -> np.ndarray:
        return self.counts[self.structure.factors.index(child)]


def normalize_counts(counts: DirichletCounts) -> TransitionModel:
    """Expected CPTs: each column of counts divided by its sum over the child axis."""
    return counts.structure.with_cpts([c / c.sum(axis=0, keepdims=True) for c in counts.counts])


def update_transition_counts(
    counts: DirichletCounts,
    prev_belief: BeliefState,
    joint_action: Mapping[str, str] | Sequence[int],
    new_belief: BeliefState,
    learning_rate: float = 1.0,
) -> DirichletCounts:
    """Add ``learning_rate * new_child (x) prev_parents`` to the columns of the taken action."""
    if not learning_rate > 0:
        raise ModelError("learning_rate must be positive")
    structure = counts.structure
    act = dict(zip(structure.controls.names, structure.controls.action_indices(joint_action)))
    updated = []
    for m, c in zip(structure.cpts, counts.counts):
        outer = new_belief[m.child]
        for p in m.state_parents:
            outer = np.multiply.outer(outer, prev_belief[p])
        c = c.copy()
        sel = (Ellipsis,) + tuple(act[u] for u in m.control_parents)
        c[sel] += learning_rate * outer
        updated.append(c)
    return DirichletCounts(structure, tuple(updated))
