import itertools

import numpy as np
import pytest

from continuum_aif.inference import (
    BeliefState,
    ControlSpace,
    FactorSpace,
    PreferenceModel,
    TransitionFactorModel,
    TransitionModel,
)


def random_model(rng, n_factors=3, max_card=3, n_controls=2, deterministic=False, max_parents=2):
    """Small random factored model for property tests."""
    factors = FactorSpace(
        [(f"s{i}", [f"v{k}" for k in range(rng.integers(2, max_card + 1))]) for i in range(n_factors)]
    )
    controls = ControlSpace([(f"u{i}", [f"a{k}" for k in range(rng.integers(2, 4))]) for i in range(n_controls)])
    cpts = []
    for name in factors.names:
        others = [f for f in factors.names if f != name]
        extra = list(rng.choice(others, size=rng.integers(0, min(max_parents, len(others)) + 1), replace=False))
        state_parents = (name, *extra)
        control_parents = tuple(c for c in controls.names if rng.random() < 0.7)
        shape = (factors.card(name),) + tuple(factors.card(p) for p in state_parents) + tuple(
            controls.card(c) for c in control_parents
        )
        if deterministic:
            idx = rng.integers(0, shape[0], size=shape[1:])
            cpt = np.zeros(shape)
            for cell in itertools.product(*(range(k) for k in shape[1:])):
                cpt[(idx[cell],) + cell] = 1.0
        else:
            cpt = rng.gamma(1.0, size=shape)
            cpt /= cpt.sum(axis=0, keepdims=True)
        cpts.append(TransitionFactorModel(name, state_parents, control_parents, cpt))
    model = TransitionModel(factors, controls, tuple(cpts))
    prefs = PreferenceModel({n: rng.normal(size=factors.card(n)) for n in factors.names})
    return model, prefs


def random_belief(rng, factors, delta=False):
    marg = []
    for c in factors.cards:
        if delta:
            q = np.zeros(c)
            q[rng.integers(c)] = 1.0
        else:
            q = rng.dirichlet(np.ones(c))
        marg.append(q)
    return BeliefState(factors, tuple(marg))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
