"""Linear-chain CRF: parameters, exact inference and model files.

Parameters live in one flat vector.  The first ``A * L`` entries are
emission weights (attribute x label, row-major); the remaining
``(L + 1) ** 2`` are transition weights where row ``L`` is the begin state
and column ``L`` the end state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from ..errors import DataError
from .features import FeatureTemplate, Observation, extract_features

FORMAT_VERSION = 1


class EmptySequence(DataError):
    pass


class UnlabeledSequence(DataError):
    pass


class LabelOutsideSet(DataError):
    pass


@dataclass(frozen=True)
class LabeledSequence:
    observations: tuple[Mapping[str, str], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(self.observations):
                raise DataError(f"{len(self.labels)} labels for "
                                f"{len(self.observations)} observations")

    def __len__(self) -> int:
        return len(self.observations)


def _lse(a: np.ndarray, axis: int) -> np.ndarray:
    m = a.max(axis=axis, keepdims=True)
    return (m + np.log(np.exp(a - m).sum(axis=axis, keepdims=True))).squeeze(axis)


@dataclass(frozen=True, eq=False)
class CrfModel:
    labels: tuple[str, ...]
    attributes: tuple[str, ...]
    weights: np.ndarray
    templates: tuple[FeatureTemplate, ...] = ()
    l2: float = 0.0
    seed: int = 0
    feature_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "templates", tuple(self.templates))
        if not self.labels:
            raise DataError("label set must be non-empty")
        if len(set(self.labels)) != len(self.labels):
            raise DataError("duplicate labels")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.n_params,):
            raise DataError(f"expected {self.n_params} weights, got {w.shape}")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "feature_index",
                           {a: i for i, a in enumerate(self.attributes)})

    @classmethod
    def zeros(cls, labels: Sequence[str], attributes: Sequence[str],
              templates: Sequence[FeatureTemplate] = (), **kw) -> "CrfModel":
        n = len(attributes) * len(labels) + (len(labels) + 1) ** 2
        return cls(tuple(labels), tuple(attributes), np.zeros(n), tuple(templates), **kw)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_params(self) -> int:
        return len(self.attributes) * len(self.labels) + (len(self.labels) + 1) ** 2

    @property
    def emission(self) -> np.ndarray:
        return self.weights[:len(self.attributes) * self.n_labels].reshape(
            len(self.attributes), self.n_labels)

    @property
    def transition(self) -> np.ndarray:
        L = self.n_labels
        return self.weights[len(self.attributes) * L:].reshape(L + 1, L + 1)

    def with_weights(self, weights: np.ndarray) -> "CrfModel":
        return CrfModel(self.labels, self.attributes, weights, self.templates,
                        self.l2, self.seed)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrfModel):
            return NotImplemented
        return (self.labels == other.labels and self.attributes == other.attributes
                and self.templates == other.templates and self.l2 == other.l2
                and self.seed == other.seed
                and np.array_equal(self.weights, other.weights))

    # --- encoding ----------------------------------------------------------

    def attribute_ids(self, seq: LabeledSequence) -> list[list[int]]:
        """Known attribute ids per position; unseen attributes are dropped."""
        index = self.feature_index
        out = []
        for t in range(len(seq)):
            feats = extract_features(seq.observations, t, self.templates)
            out.append([index[f] for f in feats if f in index])
        return out

    def design_matrix(self, seqs: Sequence[LabeledSequence]) -> tuple[sparse.csr_matrix, np.ndarray]:
        """Stacked 0/1 attribute matrix for all positions and per-sequence row offsets."""
        indptr = [0]
        indices: list[int] = []
        offsets = [0]
        for seq in seqs:
            for ids in self.attribute_ids(seq):
                indices.extend(ids)
                indptr.append(len(indices))
            offsets.append(offsets[-1] + len(seq))
        X = sparse.csr_matrix(
            (np.ones(len(indices)), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
            shape=(offsets[-1], len(self.attributes)))
        return X, np.asarray(offsets)

    def emission_scores(self, seq: LabeledSequence) -> np.ndarray:
        if len(seq) == 0:
            raise EmptySequence("empty sequence")
        X, _ = self.design_matrix([seq])
        return np.asarray(X @ self.emission)

    def label_ids(self, labels: Iterable[str]) -> np.ndarray:
        lookup = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return np.asarray([lookup[lab] for lab in labels], dtype=np.int64)
        except KeyError as exc:
            raise LabelOutsideSet(f"label {exc.args[0]!r} not in {self.labels}") from None


# --- inference on score arrays -------------------------------------------------
# E has shape (B, n, L): a batch of B sequences of equal length n.


def _alpha_beta(E: np.ndarray, trans: np.ndarray):
    B, n, L = E.shape
    T = trans[:L, :L]
    alpha = np.empty_like(E)
    beta = np.empty_like(E)
    alpha[:, 0] = trans[L, :L] + E[:, 0]
    for t in range(1, n):
        alpha[:, t] = _lse(alpha[:, t - 1, :, None] + T, axis=1) + E[:, t]
    log_z = _lse(alpha[:, -1] + trans[:L, L], axis=1)
    beta[:, -1] = trans[:L, L]
    for t in range(n - 2, -1, -1):
        beta[:, t] = _lse(T + (E[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
    return alpha, beta, log_z


def _pair_logp(alpha, beta, log_z, E, T, t):
    return (alpha[:, t - 1, :, None] + T + (E[:, t] + beta[:, t])[:, None, :]
            - log_z[:, None, None])


def forward_backward(E: np.ndarray, trans: np.ndarray):
    """Return (log Z per sequence, unary marginals, summed pairwise marginals).

    Pairwise marginals come back as an ``(L + 1, L + 1)`` array laid out
    like the transition block, summed over the batch.
    """
    B, n, L = E.shape
    T = trans[:L, :L]
    alpha, beta, log_z = _alpha_beta(E, trans)
    unary = np.exp(alpha + beta - log_z[:, None, None])
    pair = np.zeros((L + 1, L + 1))
    pair[L, :L] = unary[:, 0].sum(axis=0)
    pair[:L, L] = unary[:, -1].sum(axis=0)
    for t in range(1, n):
        pair[:L, :L] += np.exp(_pair_logp(alpha, beta, log_z, E, T, t)).sum(axis=0)
    return log_z, unary, pair


def viterbi_scores(E: np.ndarray, trans: np.ndarray) -> np.ndarray:
    """Best label ids, shape (B, n); ties go to the lower label index."""
    B, n, L = E.shape
    T = trans[:L, :L]
    delta = trans[L, :L] + E[:, 0]
    back = np.zeros((B, n, L), dtype=np.int64)
    for t in range(1, n):
        cand = delta[:, :, None] + T
        back[:, t] = cand.argmax(axis=1)
        delta = cand.max(axis=1) + E[:, t]
    path = np.empty((B, n), dtype=np.int64)
    path[:, -1] = (delta + trans[:L, L]).argmax(axis=1)
    rows = np.arange(B)
    for t in range(n - 1, 0, -1):
        path[:, t - 1] = back[rows, t, path[:, t]]
    return path


def sequence_score(E: np.ndarray, trans: np.ndarray, y: np.ndarray) -> float:
    """Unnormalized score of one label path; E has shape (n, L)."""
    L = E.shape[1]
    s = trans[L, y[0]] + trans[y[-1], L] + E[np.arange(len(y)), y].sum()
    s += trans[y[:-1], y[1:]].sum()
    return float(s)


# --- public single-sequence API ---------------------------------------------


def log_partition(model: CrfModel, seq: LabeledSequence) -> float:
    E = model.emission_scores(seq)
    log_z, _, _ = forward_backward(E[None], model.transition)
    return float(log_z[0])


def marginals(model: CrfModel, seq: LabeledSequence) -> np.ndarray:
    """Per-position label distributions, shape (n, L)."""
    E = model.emission_scores(seq)
    _, unary, _ = forward_backward(E[None], model.transition)
    return unary[0]


def pairwise_marginals(model: CrfModel, seq: LabeledSequence) -> np.ndarray:
    """P(y[t-1] = i, y[t] = j) for t = 1..n-1, shape (n - 1, L, L)."""
    E = model.emission_scores(seq)[None]
    L = model.n_labels
    alpha, beta, log_z = _alpha_beta(E, model.transition)
    T = model.transition[:L, :L]
    return np.stack([np.exp(_pair_logp(alpha, beta, log_z, E, T, t))[0]
                     for t in range(1, len(seq))]) if len(seq) > 1 else np.zeros((0, L, L))


def viterbi(model: CrfModel, seq: LabeledSequence) -> list[str]:
    E = model.emission_scores(seq)
    path = viterbi_scores(E[None], model.transition)[0]
    return [model.labels[i] for i in path]


def tag(model: CrfModel, seq: LabeledSequence) -> list[str]:
    if len(seq) == 0:
        return []
    return viterbi(model, seq)


def tag_many(model: CrfModel, seqs: Sequence[LabeledSequence]) -> list[list[str]]:
    """Batched Viterbi over many sequences; output order follows input."""
    results: list[list[str] | None] = [None] * len(seqs)
    nonempty = [i for i, s in enumerate(seqs) if len(s)]
    for i, s in enumerate(seqs):
        if not len(s):
            results[i] = []
    if nonempty:
        X, offsets = model.design_matrix([seqs[i] for i in nonempty])
        E_all = np.asarray(X @ model.emission)
        for n, members in _length_buckets([len(seqs[i]) for i in nonempty]).items():
            rows = offsets[members][:, None] + np.arange(n)
            paths = viterbi_scores(E_all[rows], model.transition)
            for m, path in zip(members, paths):
                results[nonempty[m]] = [model.labels[k] for k in path]
    return results


def _length_buckets(lengths: Sequence[int]) -> dict[int, np.ndarray]:
    buckets: dict[int, list[int]] = {}
    for i, n in enumerate(lengths):
        buckets.setdefault(n, []).append(i)
    return {n: np.asarray(ix) for n, ix in sorted(buckets.items())}


# --- model files ---------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n"}


def _escape(s: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in s)


def _unescape(s: str) -> str:
    out = []
    it = iter(s)
    for ch in it:
        if ch == "\\":
            nxt = next(it, "")
            out.append({"\\": "\\", "t": "\t", "n": "\n"}.get(nxt, nxt))
        else:
            out.append(ch)
    return "".join(out)


def dumps_model(model: CrfModel) -> str:
    L = model.n_labels
    lines = [f"#crf-model\t{FORMAT_VERSION}",
             "labels\t" + "\t".join(_escape(lab) for lab in model.labels),
             f"l2\t{float(model.l2)!r}",
             f"seed\t{model.seed}"]
    for tpl in model.templates:
        lines.append("template\t" + json.dumps(tpl.to_dict(), ensure_ascii=False))
    lines.append(f"features\t{model.n_params}")
    W = model.emission
    for a, attr in enumerate(model.attributes):
        for j in range(L):
            lines.append(f"E{j}:{_escape(attr)}\t{float(W[a, j])!r}")
    names = [str(j) for j in range(L)]
    trans = model.transition
    for i, src in enumerate(names + ["BOS"]):
        for j, dst in enumerate(names + ["EOS"]):
            lines.append(f"T{src}:{dst}\t{float(trans[i, j])!r}")
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> CrfModel:
    lines = text.split("\n")
    if not lines or lines[0] != f"#crf-model\t{FORMAT_VERSION}":
        raise DataError("not a CRF model file (or unsupported version)")
    labels: tuple[str, ...] = ()
    l2, seed = 0.0, 0
    templates = []
    k = 1
    while k < len(lines) and not lines[k].startswith("features\t"):
        key, _, value = lines[k].partition("\t")
        if key == "labels":
            labels = tuple(_unescape(v) for v in value.split("\t"))
        elif key == "l2":
            l2 = float(value)
        elif key == "seed":
            seed = int(value)
        elif key == "template":
            templates.append(FeatureTemplate.from_dict(json.loads(value)))
        else:
            raise DataError(f"model file line {k + 1}: unknown header {key!r}")
        k += 1
    if k == len(lines):
        raise DataError("model file has no feature section")
    n_params = int(lines[k].partition("\t")[2])
    L = len(labels)
    body = [ln for ln in lines[k + 1:] if ln]
    n_emission = n_params - (L + 1) ** 2
    if n_emission % L or len(body) != n_params:
        raise DataError("model file feature count does not match its header")
    attributes = []
    weights = np.empty(n_params)
    for idx, ln in enumerate(body):
        feat, _, value = ln.rpartition("\t")
        weights[idx] = float(value)
        if idx < n_emission and idx % L == 0:
            attributes.append(_unescape(feat.split(":", 1)[1]))
    return CrfModel(labels, tuple(attributes), weights, tuple(templates), l2, seed)
