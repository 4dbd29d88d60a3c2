"""Glue between verse lines and sequence models.

A verse line becomes a sequence of syllable observations; a trained tagger
predicts one syllable layer (or two at once with joint labels) and the
predictions are written back onto the line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import (SYLLABLE_LAYERS, VerseLine, layer_labels,
                     normalize_text, strip_punctuation, tokenize_line, with_layer_labels)
from .crf import (CrfModel, LabeledSequence, TrainConfig, dumps_model, join, join_tasks,
                  loads_model, meter_preset, project, tag_many, train)
from .errors import DataError, MissingLayer
from .measures import MeasureCatalog, classify_line
from .syllabifier import Syllabifier, syllabify_line

TAGGABLE = tuple(name for name in SYLLABLE_LAYERS if name != "pos")


def line_observations(line: VerseLine) -> tuple[dict[str, str], ...]:
    n = len(line)
    out = []
    for i, syl in enumerate(line.syllables):
        obs = {"form": syl.text, "pos_in_word": str(syl.pos_in_word),
               "dstart": str(i), "dend": str(n - 1 - i)}
        if line.pos is not None:
            obs["pos"] = line.pos[i]
        out.append(obs)
    return tuple(out)


def line_sequence(line: VerseLine, layer: str | None = None,
                  aux_layer: str | None = None) -> LabeledSequence:
    labels = None
    if layer is not None:
        labels = layer_labels(line, layer)
        if aux_layer is not None:
            labels = join(labels, layer_labels(line, aux_layer))
    return LabeledSequence(line_observations(line), labels)


def _label_set(layer: str) -> tuple[str, ...] | None:
    return {"met": ("+", "-"), "foot_end": (".", ":"), "caesura_after": (".", ":"),
            "main_accent": ("0", "1", "2")}.get(layer)


@dataclass(frozen=True)
class Tagger:
    """A CRF predicting ``layer`` (and ``aux_layer`` jointly when set)."""

    crf: CrfModel
    layer: str
    aux_layer: str | None = None

    def __post_init__(self):
        for name in (self.layer, self.aux_layer):
            if name is not None and name not in TAGGABLE:
                raise DataError(f"cannot tag layer {name!r}; choose from {TAGGABLE}")

    def tag_lines(self, lines: Sequence[VerseLine]) -> list[VerseLine]:
        predicted = tag_many(self.crf, [line_sequence(line) for line in lines])
        out = []
        for line, labels in zip(lines, predicted):
            if self.aux_layer is None:
                out.append(with_layer_labels(line, self.layer, labels))
                continue
            line = with_layer_labels(line, self.layer, project(labels, "primary"))
            out.append(with_layer_labels(line, self.aux_layer, project(labels, "aux")))
        return out

    def dumps(self) -> str:
        return f"#tagger\t{self.layer}\t{self.aux_layer or '-'}\n" + dumps_model(self.crf)

    @classmethod
    def loads(cls, text: str) -> "Tagger":
        head, _, rest = text.partition("\n")
        parts = head.split("\t")
        if len(parts) != 3 or parts[0] != "#tagger":
            raise DataError("not a tagger model file")
        return cls(loads_model(rest), parts[1], None if parts[2] == "-" else parts[2])


def train_tagger(lines: Sequence[VerseLine], layer: str = "met", aux_layer: str | None = None,
                 config: TrainConfig = TrainConfig(), use_pos: bool | None = None) -> Tagger:
    """Train on lines carrying ``layer``; POS features are used when every line has tags."""
    if use_pos is None:
        use_pos = bool(lines) and all(line.pos is not None for line in lines)
    data = [line_sequence(line, layer, aux_layer) for line in lines]
    labels = _label_set(layer)
    if aux_layer is not None:
        aux = _label_set(aux_layer)
        labels = join_tasks(labels, aux) if labels and aux else None
    crf = train(data, meter_preset(use_pos=use_pos), labels, config)
    return Tagger(crf, layer, aux_layer)


def assign_measures(lines: Iterable[VerseLine],
                    catalog: MeasureCatalog | None = None) -> list[VerseLine]:
    """Fill fmsr, smsr and met_line from each line's stress layer."""
    out = []
    for k, line in enumerate(lines):
        if line.met is None:
            raise MissingLayer(f"line {k} has no met layer")
        fmsr, smsr = classify_line(line.met_string, catalog)
        out.append(line.replace(fmsr=fmsr, smsr=smsr, met_line=line.met_string))
    return out


def text_to_lines(text: str, syllabifier: Syllabifier) -> list[list[VerseLine]]:
    """Raw verse to unannotated lines, grouped into stanzas at blank lines."""
    stanzas: list[list[VerseLine]] = [[]]
    for raw in normalize_text(text).splitlines():
        tokens = strip_punctuation(tokenize_line(raw))
        if not tokens:
            if stanzas[-1]:
                stanzas.append([])
            continue
        stanzas[-1].append(VerseLine(tuple(syllabify_line(tokens, syllabifier))))
    return [s for s in stanzas if s]

