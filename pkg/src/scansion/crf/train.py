"""Maximum-likelihood training with per-coordinate adaptive steps (AdaGrad)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DataError
from ..metrics import EvalReport, score_sequences
from .features import FeatureTemplate, extract_features
from .model import (CrfModel, LabeledSequence, LabelOutsideSet, UnlabeledSequence,
                    _length_buckets, forward_backward, tag_many,
                    viterbi_scores)

log = logging.getLogger(__name__)


class EmptyData(DataError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    learning_rate: float = 0.1
    l2: float = 1e-4
    seed: int = 42
    patience: int = 10
    dev_fraction: float = 0.1
    batch_size: int | None = 32  # None = full batch
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 1:
            raise DataError("epochs must be >= 1")
        if self.l2 < 0:
            raise DataError("l2 must be >= 0")
        if not 0 <= self.dev_fraction < 1:
            raise DataError("dev_fraction must be in [0, 1)")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    dev_accuracy: float


@dataclass(frozen=True)
class TrainResult:
    model: CrfModel
    history: tuple[EpochStats, ...]
    best_epoch: int
    n_train: int
    n_dev: int


class _Encoded:
    """Design matrix, gold label ids and length buckets for a fixed data set."""

    def __init__(self, X, y: np.ndarray, lengths: Sequence[int], n_labels: int):
        self.X = X
        self.XT = X.T.tocsr()
        self.y = y
        self.lengths = list(lengths)
        self.offsets = np.concatenate([[0], np.cumsum(self.lengths)]).astype(np.int64)
        self.buckets = _length_buckets(self.lengths)
        L = n_labels
        # empirical transition counts, constant for the data set
        self.empirical_trans = np.zeros((L + 1, L + 1))
        for k, n in enumerate(self.lengths):
            if n == 0:
                continue
            ys = y[self.offsets[k]:self.offsets[k] + n]
            self.empirical_trans[L, ys[0]] += 1
            self.empirical_trans[ys[-1], L] += 1
            np.add.at(self.empirical_trans, (ys[:-1], ys[1:]), 1)
        onehot = np.zeros((len(y), L))
        onehot[np.arange(len(y)), y] = 1.0
        self.empirical_emission = np.asarray(self.XT @ onehot)

    @classmethod
    def build(cls, model: CrfModel, seqs: Sequence[LabeledSequence]) -> "_Encoded":
        for k, seq in enumerate(seqs):
            if seq.labels is None:
                raise UnlabeledSequence(f"sequence {k} has no labels")
        X, _ = model.design_matrix(seqs)
        y = (np.concatenate([model.label_ids(s.labels) for s in seqs])
             if seqs else np.zeros(0, dtype=np.int64))
        return cls(X, y, [len(s) for s in seqs], model.n_labels)

    def subset(self, idx: Sequence[int]) -> "_Encoded":
        rows = np.concatenate([np.arange(self.offsets[i], self.offsets[i + 1]) for i in idx])
        return _Encoded(self.X[rows], self.y[rows], [self.lengths[i] for i in idx],
                        self.empirical_trans.shape[0] - 1)


def _objective(model: CrfModel, enc: _Encoded, weights: np.ndarray, l2: float):
    A, L = len(model.attributes), model.n_labels
    W = weights[:A * L].reshape(A, L)
    trans = weights[A * L:].reshape(L + 1, L + 1)
    E_all = np.asarray(enc.X @ W)
    unary_all = np.zeros_like(E_all)
    expected_trans = np.zeros((L + 1, L + 1))
    log_z_total = 0.0
    for n, members in enc.buckets.items():
        if n == 0:
            continue
        rows = enc.offsets[members][:, None] + np.arange(n)
        log_z, unary, pair = forward_backward(E_all[rows], trans)
        log_z_total += log_z.sum()
        unary_all[rows] = unary
        expected_trans += pair
    gold = (E_all[np.arange(len(enc.y)), enc.y].sum()
            + (enc.empirical_trans * trans).sum())
    nll = log_z_total - gold + 0.5 * l2 * float(weights @ weights)
    grad_W = np.asarray(enc.XT @ unary_all) - enc.empirical_emission
    grad = np.concatenate([grad_W.ravel(), (expected_trans - enc.empirical_trans).ravel()])
    grad += l2 * weights
    return float(nll), grad


def nll_and_gradient(model: CrfModel, batch: Sequence[LabeledSequence],
                     weights: np.ndarray | None = None, l2: float | None = None):
    """L2-regularized negative log-likelihood of ``batch`` and its exact gradient."""
    enc = _Encoded.build(model, batch)
    w = model.weights if weights is None else np.asarray(weights, dtype=np.float64)
    return _objective(model, enc, w, model.l2 if l2 is None else l2)


def build_attributes(seqs: Sequence[LabeledSequence],
                     templates: Sequence[FeatureTemplate]) -> list[str]:
    seen: dict[str, None] = {}
    for seq in seqs:
        for t in range(len(seq)):
            for f in extract_features(seq.observations, t, templates):
                seen.setdefault(f)
    return list(seen)


def _accuracy(model: CrfModel, enc: _Encoded, weights: np.ndarray) -> float:
    A, L = len(model.attributes), model.n_labels
    E_all = np.asarray(enc.X @ weights[:A * L].reshape(A, L))
    trans = weights[A * L:].reshape(L + 1, L + 1)
    right = 0
    for n, members in enc.buckets.items():
        if n == 0:
            continue
        rows = enc.offsets[members][:, None] + np.arange(n)
        right += int((viterbi_scores(E_all[rows], trans) == enc.y[rows]).sum())
    return right / len(enc.y) if len(enc.y) else 1.0


def train_with_history(data: Sequence[LabeledSequence], templates: Sequence[FeatureTemplate],
                       labels: Sequence[str] | None = None,
                       config: TrainConfig = TrainConfig()) -> TrainResult:
    data = list(data)
    if not data:
        raise EmptyData("no training sequences")
    for k, seq in enumerate(data):
        if seq.labels is None:
            raise UnlabeledSequence(f"sequence {k} has no labels")
    seen_labels = sorted({lab for seq in data for lab in seq.labels})
    if labels is None:
        labels = seen_labels
    outside = set(seen_labels) - set(labels)
    if outside:
        raise LabelOutsideSet(f"labels {sorted(outside)} not in label set {list(labels)}")

    rng = np.random.default_rng(config.seed)
    n_dev = int(round(config.dev_fraction * len(data)))
    if n_dev == 0 or n_dev >= len(data):
        train_set, dev_set = data, data
    else:
        order = rng.permutation(len(data))
        dev_set = [data[i] for i in sorted(order[:n_dev])]
        train_set = [data[i] for i in sorted(order[n_dev:])]

    attributes = build_attributes(train_set, templates)
    model = CrfModel.zeros(labels, attributes, templates, l2=config.l2, seed=config.seed)
    full = _Encoded.build(model, train_set)
    dev = full if dev_set is train_set else _Encoded.build(model, dev_set)
    weights = np.zeros(model.n_params)
    accum = np.zeros(model.n_params)
    batch_size = config.batch_size or len(train_set)
    n_batches = -(-len(train_set) // batch_size)

    best_acc, best_weights, best_epoch = -1.0, weights.copy(), 0
    history: list[EpochStats] = []
    since_best = 0
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_set)) if n_batches > 1 else np.arange(len(train_set))
        for b in range(n_batches):
            idx = np.sort(order[b * batch_size:(b + 1) * batch_size])
            enc = full if n_batches == 1 else full.subset(idx)
            share = len(idx) / len(train_set)
            _, grad = _objective(model, enc, weights, config.l2 * share)
            accum += grad * grad
            weights -= config.learning_rate * grad / (np.sqrt(accum) + config.eps)
        loss, _ = _objective(model, full, weights, config.l2)
        acc = _accuracy(model, dev, weights)
        history.append(EpochStats(epoch, loss, acc))
        log.debug("epoch %d loss %.4f dev acc %.4f", epoch, loss, acc)
        # ties go to the later epoch; only strict gains reset the patience clock
        since_best = 0 if acc > best_acc else since_best + 1
        if acc >= best_acc:
            best_acc, best_weights, best_epoch = acc, weights.copy(), epoch
        if since_best >= config.patience:
            break
    return TrainResult(model.with_weights(best_weights), tuple(history), best_epoch,
                       len(train_set), len(dev_set) if dev_set is not data else 0)


def train(data: Sequence[LabeledSequence], templates: Sequence[FeatureTemplate],
          labels: Sequence[str] | None = None, config: TrainConfig = TrainConfig()) -> CrfModel:
    """Train a CRF; returns the weights with the best dev syllable accuracy."""
    return train_with_history(data, templates, labels, config).model


def evaluate(model: CrfModel, gold: Sequence[LabeledSequence]) -> EvalReport:
    """Tag ``gold`` and score the predictions against its labels."""
    for k, seq in enumerate(gold):
        if seq.labels is None:
            raise UnlabeledSequence(f"sequence {k} has no labels")
    return score_sequences([seq.labels for seq in gold], tag_many(model, gold))
