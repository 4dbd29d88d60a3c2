"""Feature templates for linear-chain CRFs.

A template reads one field of the observation records at a set of relative
offsets and renders strings such as ``form[0]=Look`` or ``suf2[-1]=ir``.
Positions outside the sequence render as ``<BOS>`` / ``<EOS>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import DataError

MAX_OFFSET = 4
TRANSFORMS = ("identity", "lower", "is_cap", "prefix", "suffix", "bias")
BOS, EOS = "<BOS>", "<EOS>"

Observation = Mapping[str, str]


@dataclass(frozen=True)
class FeatureTemplate:
    """``conjoin=True`` emits one feature joining all offsets instead of one per offset."""

    name: str
    field: str = "form"
    offsets: tuple[int, ...] = (0,)
    transform: str = "identity"
    k: int = 0
    conjoin: bool = False

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(self.offsets))
        if self.transform not in TRANSFORMS:
            raise DataError(f"unknown transform {self.transform!r}")
        if self.transform in ("prefix", "suffix") and not 1 <= self.k <= 4:
            raise DataError(f"{self.name}: affix length must be 1..4, got {self.k}")
        if not self.offsets:
            raise DataError(f"{self.name}: no offsets")
        if any(abs(o) > MAX_OFFSET for o in self.offsets):
            raise DataError(f"{self.name}: offsets must lie within ±{MAX_OFFSET}")

    def to_dict(self) -> dict:
        return {"name": self.name, "field": self.field, "offsets": list(self.offsets),
                "transform": self.transform, "k": self.k, "conjoin": self.conjoin}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FeatureTemplate":
        return cls(d["name"], d["field"], tuple(d["offsets"]), d["transform"],
                   d.get("k", 0), d.get("conjoin", False))


def _render(template: FeatureTemplate, value: str) -> str:
    t = template.transform
    if t == "identity":
        return value
    if t == "lower":
        return value.lower()
    if t == "is_cap":
        return "1" if value[:1].isupper() else "0"
    if t == "prefix":
        return value[:template.k]
    return value[-template.k:]


def _value(seq: Sequence[Observation], pos: int, template: FeatureTemplate) -> str | None:
    if pos < 0:
        return BOS
    if pos >= len(seq):
        return EOS
    raw = seq[pos].get(template.field)
    if raw is None:
        return None
    return _render(template, raw)


def extract_features(seq: Sequence[Observation], t: int,
                     templates: Sequence[FeatureTemplate]) -> list[str]:
    """Feature strings for position ``t``, deduplicated, in template order."""
    if not 0 <= t < len(seq):
        raise IndexError(f"position {t} outside sequence of length {len(seq)}")
    out: list[str] = []
    for tpl in templates:
        if tpl.transform == "bias":
            out.append(tpl.name)
            continue
        if tpl.conjoin:
            values = [_value(seq, t + o, tpl) for o in tpl.offsets]
            if any(v is None for v in values):
                continue
            where = "|".join(str(o) for o in tpl.offsets)
            out.append(f"{tpl.name}[{where}]=" + "|".join(values))
        else:
            for o in tpl.offsets:
                v = _value(seq, t + o, tpl)
                if v is not None:
                    out.append(f"{tpl.name}[{o}]={v}")
    return list(dict.fromkeys(out))


# --- presets -------------------------------------------------------------------

WINDOW2 = (-2, -1, 0, 1, 2)


def _affixes(field: str) -> list[FeatureTemplate]:
    return ([FeatureTemplate(f"pre{k}", field, (0,), "prefix", k) for k in range(1, 5)]
            + [FeatureTemplate(f"suf{k}", field, (0,), "suffix", k) for k in range(1, 5)])


def pos_preset() -> list[FeatureTemplate]:
    """Word form, ±2 forms and tags, capitalization, affixes of length 1-4."""
    return [
        FeatureTemplate("bias", transform="bias"),
        FeatureTemplate("form", "form", WINDOW2),
        FeatureTemplate("tag", "pos", (-2, -1, 1, 2)),
        FeatureTemplate("cap", "form", (0,), "is_cap"),
        *_affixes("form"),
    ]


def meter_preset(use_pos: bool = True) -> list[FeatureTemplate]:
    """The POS recipe applied to syllables, plus word position and line position."""
    templates = [
        FeatureTemplate("bias", transform="bias"),
        FeatureTemplate("form", "form", WINDOW2, "lower"),
        FeatureTemplate("cap", "form", (0,), "is_cap"),
        *_affixes("form"),
        FeatureTemplate("syll", "pos_in_word", (-1, 0, 1)),
        FeatureTemplate("syll2", "pos_in_word", (0, 1), conjoin=True),
        FeatureTemplate("dstart", "dstart"),
        FeatureTemplate("dend", "dend"),
    ]
    if use_pos:
        templates.append(FeatureTemplate("tag", "pos", WINDOW2))
    return templates


def char_preset(radius: int = 3) -> list[FeatureTemplate]:
    """Character windows for boundary tagging: unigrams and contiguous n-grams."""
    offsets = tuple(range(-radius, radius + 1))
    templates = [FeatureTemplate("bias", transform="bias"),
                 FeatureTemplate("c", "form", offsets, "lower")]
    for width in (2, 3, 4):
        for start in range(-radius, radius - width + 2):
            span = tuple(range(start, start + width))
            # n-grams that touch the junction between positions 0 and 1
            if span[0] <= 1 and span[-1] >= 0:
                templates.append(FeatureTemplate(f"g{width}", "form", span, "lower", conjoin=True))
    templates.append(FeatureTemplate("cls", "cls", (-2, -1, 0, 1, 2)))
    templates.append(FeatureTemplate("cls3", "cls", (-1, 0, 1, 2), conjoin=True))
    templates.append(FeatureTemplate("dstart", "dstart"))
    templates.append(FeatureTemplate("dend", "dend"))
    return templates
