"""Independent reference computations for CRF tests: exhaustive enumeration
and finite differences.  Nothing here reuses the forward-backward code."""

from __future__ import annotations

import itertools

import numpy as np

from scansion.crf import CrfModel, FeatureTemplate, LabeledSequence


def path_score(E: np.ndarray, trans: np.ndarray, path) -> float:
    L = E.shape[1]
    s = trans[L, path[0]] + trans[path[-1], L]
    for t, y in enumerate(path):
        s += E[t, y]
        if t:
            s += trans[path[t - 1], y]
    return float(s)


def enumerate_paths(E: np.ndarray, trans: np.ndarray):
    n, L = E.shape
    return {path: path_score(E, trans, path) for path in itertools.product(range(L), repeat=n)}


def brute_log_partition(E, trans) -> float:
    scores = np.array(list(enumerate_paths(E, trans).values()))
    m = scores.max()
    return float(m + np.log(np.exp(scores - m).sum()))


def brute_argmax(E, trans) -> tuple[int, ...]:
    scores = enumerate_paths(E, trans)
    best = max(scores.values())
    # lexicographically smallest among the maximizers: lower label ids first
    return min(p for p, s in scores.items() if np.isclose(s, best, rtol=0, atol=1e-12))


def brute_marginals(E, trans) -> np.ndarray:
    scores = enumerate_paths(E, trans)
    z = brute_log_partition(E, trans)
    out = np.zeros(E.shape)
    for path, s in scores.items():
        for t, y in enumerate(path):
            out[t, y] += np.exp(s - z)
    return out


def central_differences(f, w: np.ndarray, h: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(w)
    for i in range(len(w)):
        e = np.zeros_like(w)
        e[i] = h
        grad[i] = (f(w + e) - f(w - e)) / (2 * h)
    return grad


TEMPLATES = [FeatureTemplate("bias", transform="bias"),
             FeatureTemplate("form", "form", (-1, 0, 1))]
ALPHABET = "abcd"


def random_instance(rng: np.random.Generator, max_len: int = 7, max_labels: int = 4,
                    scale: float = 1.0):
    """A random model over all features of a random sequence, plus that sequence."""
    n = int(rng.integers(1, max_len + 1))
    L = int(rng.integers(1, max_labels + 1))
    labels = [f"y{k}" for k in range(L)]
    forms = "".join(rng.choice(list(ALPHABET), size=n))
    seq = LabeledSequence(tuple({"form": c} for c in forms),
                          tuple(rng.choice(labels, size=n)))
    from scansion.crf import build_attributes
    attrs = build_attributes([seq], TEMPLATES)
    model = CrfModel.zeros(labels, attrs, TEMPLATES, l2=0.0, seed=0)
    model = model.with_weights(rng.normal(scale=scale, size=model.n_params))
    return model, seq
