"""Joint-label decoding of two aligned annotation layers.

Each position gets the ordered pair ``primary|aux`` as its label, so one
chain model learns both layers and their interaction; projections recover
the individual layers.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

from ..errors import DataError, Misaligned
from .model import LabeledSequence

SEPARATOR = "|"
TASKS = ("primary", "aux")


def _check_label(label: str) -> str:
    if SEPARATOR in label:
        raise DataError(f"label {label!r} contains the joint separator {SEPARATOR!r}")
    return label


def join_tasks(primary_labels: Sequence[str], aux_labels: Sequence[str]) -> tuple[str, ...]:
    """Cross-product label set, primary-major."""
    return tuple(_check_label(a) + SEPARATOR + _check_label(b)
                 for a, b in product(primary_labels, aux_labels))


def join(primary: Sequence[str], aux: Sequence[str]) -> list[str]:
    if len(primary) != len(aux):
        raise Misaligned(f"layers differ in length: {len(primary)} vs {len(aux)}")
    return [_check_label(a) + SEPARATOR + _check_label(b) for a, b in zip(primary, aux)]


def project(joint: Sequence[str], task: str) -> list[str]:
    if task not in TASKS:
        raise DataError(f"task must be one of {TASKS}, got {task!r}")
    k = TASKS.index(task)
    out = []
    for label in joint:
        parts = label.split(SEPARATOR)
        if len(parts) != 2:
            raise DataError(f"{label!r} is not a joint label")
        out.append(parts[k])
    return out


def join_sequences(primary: Sequence[LabeledSequence],
                   aux: Sequence[LabeledSequence]) -> list[LabeledSequence]:
    """Relabel ``primary`` with joint labels; observations come from ``primary``."""
    if len(primary) != len(aux):
        raise Misaligned(f"{len(primary)} primary sequences vs {len(aux)} aux sequences")
    out = []
    for k, (p, a) in enumerate(zip(primary, aux)):
        if p.labels is None or a.labels is None:
            raise Misaligned(f"sequence {k} lacks labels in one layer")
        if len(p) != len(a):
            raise Misaligned(f"sequence {k}: {len(p)} vs {len(a)} positions")
        out.append(LabeledSequence(p.observations, tuple(join(p.labels, a.labels))))
    return out
