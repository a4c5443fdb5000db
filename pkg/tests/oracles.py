"""Slow reference implementations used as test oracles."""

import itertools
import math

import numpy as np


def predict_oracle(marginals, action, model):
    """Mean-field prediction by explicit enumeration of every parent configuration."""
    act = dict(zip(model.controls.names, action))
    names = model.factors.names
    q = dict(zip(names, marginals))
    out = []
    for m in model.cpts:
        nxt = np.zeros(model.factors.card(m.child))
        ranges = [range(model.factors.card(p)) for p in m.state_parents]
        for combo in itertools.product(*ranges):
            w = 1.0
            for p, k in zip(m.state_parents, combo):
                w *= q[p][k]
            if w == 0.0:
                continue
            cidx = tuple(act[c] for c in m.control_parents)
            for child in range(len(nxt)):
                nxt[child] += w * m.cpt[(child,) + combo + cidx]
        out.append(nxt)
    return out


def efe_oracle(policy, marginals, model, prefs):
    """Per-step-averaged pragmatic value and entropy, using plain loops."""
    q = [np.asarray(x, dtype=float) for x in marginals]
    pv = ig = 0.0
    for action in policy:
        q = predict_oracle(q, action, model)
        for name, marg in zip(model.factors.names, q):
            c = prefs[name]
            for k, p in enumerate(marg):
                pv += p * c[k]
                if p > 0:
                    ig -= p * math.log(p)
    n = len(policy)
    return pv / n, ig / n, -(pv + ig) / n


def expected_kl_info_gain(q):
    """E_{Q(o)}[KL(delta_o || Q)] under an identity likelihood."""
    total = 0.0
    for o, p in enumerate(q):
        if p <= 0:
            continue
        total += p * (-math.log(q[o]))
    return total
