"""Word syllabification: a sonority baseline and a trainable boundary tagger.

The baseline finds vowel nuclei and splits each intervocalic consonant
cluster before its least sonorous member (the one nearest the following
nucleus on ties), which maximizes onsets.  The trainable variant tags each
character as ending a syllable or not with a linear-chain CRF over
character windows.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .corpus import Syllable
from .crf import (CrfModel, LabeledSequence, TrainConfig, char_preset, dumps_model,
                  loads_model, tag_many, train)
from .errors import DataError, LengthMismatch

SEPARATOR = "·"
CLASSES = ("vowel", "glide", "liquid", "nasal", "fricative", "affricate", "plosive")
DEFAULT_RANK = {"vowel": 7, "glide": 6, "liquid": 5, "nasal": 4,
                "fricative": 3, "affricate": 2, "plosive": 1}


def _classes(**groups: str) -> dict[str, str]:
    return {ch: cls for cls, letters in groups.items() for ch in letters}


LETTER_CLASSES = {
    "en": _classes(vowel="aeiou", glide="yw", liquid="lr", nasal="mn",
                   fricative="fvszh", affricate="j", plosive="pbtdkgqcx"),
    "de": _classes(vowel="aeiouyäöü", glide="j", liquid="lr", nasal="mn",
                   fricative="fvswhß", affricate="z", plosive="pbtdkgqcx"),
}


class EmptyGold(DataError):
    pass


class InconsistentGold(DataError):
    pass


@dataclass(frozen=True)
class SonorityHierarchy:
    char_class: Mapping[str, str]
    rank: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_RANK))
    # English orthography: a word-final e after a consonant is mute ("love"),
    # except in a consonant + "le" ending ("ta-ble")
    silent_final_e: bool = False

    def __post_init__(self):
        unknown = set(self.char_class.values()) - set(self.rank)
        if unknown:
            raise DataError(f"classes without a rank: {sorted(unknown)}")
        if self.rank and max(self.rank.values()) != self.rank.get("vowel"):
            raise DataError("vowels must carry the highest sonority rank")

    @classmethod
    def for_language(cls, lang: str) -> "SonorityHierarchy":
        if lang not in LETTER_CLASSES:
            raise DataError(f"no letter classes for language {lang!r}")
        return cls(dict(LETTER_CLASSES[lang]), silent_final_e=lang == "en")

    def class_of(self, ch: str) -> str | None:
        low = ch.lower()
        if low in self.char_class:
            return self.char_class[low]
        base = unicodedata.normalize("NFD", low)[:1]
        return self.char_class.get(base)

    def sonority(self, ch: str) -> int:
        cls = self.class_of(ch)
        return 0 if cls is None else self.rank[cls]


def _nuclei(word: str, hierarchy: SonorityHierarchy) -> list[tuple[int, int]]:
    """Half-open spans of syllable peaks."""
    classes = [hierarchy.class_of(ch) for ch in word]
    son = [hierarchy.sonority(ch) for ch in word]
    is_peak = [c == "vowel" for c in classes]
    for i, c in enumerate(classes):
        if c != "glide":
            continue
        left = son[i - 1] if i > 0 else 0
        right = son[i + 1] if i + 1 < len(word) else 0
        near_vowel = (i > 0 and classes[i - 1] == "vowel") or \
                     (i + 1 < len(word) and classes[i + 1] == "vowel")
        if not near_vowel and son[i] > left and son[i] > right:
            is_peak[i] = True
    spans = []
    i = 0
    while i < len(word):
        if not is_peak[i]:
            i += 1
            continue
        j = i + 1
        if classes[i] == "vowel":
            while j < len(word) and classes[j] == "vowel":
                j += 1
        spans.append((i, j))
        i = j
    if hierarchy.silent_final_e and len(spans) > 1 and _mute_e(word.lower(), classes):
        spans.pop()
    return spans


def _mute_e(low: str, classes: list[str | None]) -> bool:
    if len(low) < 3 or low[-1] != "e" or classes[-2] == "vowel":
        return False
    return not (low[-2] == "l" and classes[-3] not in ("vowel", "glide"))


def sonority_syllabify(word: str, hierarchy: SonorityHierarchy | None = None) -> list[str]:
    """Split ``word`` at sonority minima between nuclei.

    >>> sonority_syllabify("Winden", SonorityHierarchy.for_language("de"))
    ['Win', 'den']
    """
    if not word:
        return []
    hierarchy = hierarchy or SonorityHierarchy.for_language("en")
    spans = _nuclei(word, hierarchy)
    if len(spans) < 2:
        return [word]
    cuts = []
    for (_, end), (start, _) in zip(spans, spans[1:]):
        cluster = range(end, start)
        if not cluster:
            cuts.append(start)
            continue
        low = min(hierarchy.sonority(word[i]) for i in cluster)
        cuts.append(max(i for i in cluster if hierarchy.sonority(word[i]) == low))
    bounds = [0] + cuts + [len(word)]
    return [word[a:b] for a, b in zip(bounds, bounds[1:])]


# --- trainable hyphenator ------------------------------------------------------

BOUNDARY = "boundary"
CONTINUE = "continue"
HYPHEN_LABELS = (CONTINUE, BOUNDARY)
_CLASS_CODE = {"vowel": "V", "glide": "G", "liquid": "L", "nasal": "N",
               "fricative": "F", "affricate": "A", "plosive": "P"}


def _cap(k: int) -> str:
    return str(min(k, 5))


def char_observations(word: str, hierarchy: SonorityHierarchy) -> tuple[dict[str, str], ...]:
    n = len(word)
    return tuple({"form": ch,
                  "cls": _CLASS_CODE.get(hierarchy.class_of(ch) or "", "O"),
                  "dstart": _cap(i), "dend": _cap(n - 1 - i)}
                 for i, ch in enumerate(word))


def boundary_labels(syllables: Sequence[str]) -> tuple[str, ...]:
    labels: list[str] = []
    for syl in syllables:
        labels.extend([CONTINUE] * (len(syl) - 1) + [BOUNDARY])
    labels[-1] = CONTINUE  # the word end is not an internal boundary
    return tuple(labels)


def _split(word: str, labels: Sequence[str]) -> list[str]:
    out, start = [], 0
    for i, lab in enumerate(labels[:-1]):
        if lab == BOUNDARY:
            out.append(word[start:i + 1])
            start = i + 1
    out.append(word[start:])
    return out


@dataclass(frozen=True)
class HyphenationModel:
    crf: CrfModel
    lang: str = "en"
    radius: int = 3

    def __post_init__(self):
        if set(self.crf.labels) != set(HYPHEN_LABELS) or len(self.crf.labels) != 2:
            raise DataError(f"hyphenation model needs labels {HYPHEN_LABELS}")

    @property
    def hierarchy(self) -> SonorityHierarchy:
        return SonorityHierarchy.for_language(self.lang)

    def syllabify_many(self, words: Sequence[str]) -> list[list[str]]:
        hierarchy = self.hierarchy
        seqs = [LabeledSequence(char_observations(w, hierarchy)) for w in words]
        return [_split(w, labels) if w else []
                for w, labels in zip(words, tag_many(self.crf, seqs))]

    def dumps(self) -> str:
        return f"#hyphenator\t{self.lang}\t{self.radius}\n" + dumps_model(self.crf)

    @classmethod
    def loads(cls, text: str) -> "HyphenationModel":
        head, _, rest = text.partition("\n")
        parts = head.split("\t")
        if len(parts) != 3 or parts[0] != "#hyphenator":
            raise DataError("not a hyphenation model file")
        return cls(loads_model(rest), parts[1], int(parts[2]))


def _check_gold(gold: Sequence[tuple[str, Sequence[str]]]) -> None:
    if not gold:
        raise EmptyGold("no gold words")
    for word, syllables in gold:
        if not word or "".join(syllables) != word or any(not s for s in syllables):
            raise InconsistentGold(f"syllables {list(syllables)} do not spell {word!r}")


def train_hyphenator(gold: Sequence[tuple[str, Sequence[str]]],
                     config: TrainConfig | None = None, lang: str = "en",
                     radius: int = 3) -> HyphenationModel:
    _check_gold(gold)
    hierarchy = SonorityHierarchy.for_language(lang)
    data = [LabeledSequence(char_observations(w, hierarchy), boundary_labels(s))
            for w, s in gold]
    config = config or TrainConfig(dev_fraction=0.0)
    crf = train(data, char_preset(radius), HYPHEN_LABELS, config)
    return HyphenationModel(crf, lang, radius)


Syllabifier = Union[HyphenationModel, SonorityHierarchy, Callable[[str], Sequence[str]]]


def syllabify_word(word: str, syllabifier: Syllabifier) -> list[str]:
    if not word:
        return []
    if isinstance(syllabifier, HyphenationModel):
        return syllabifier.syllabify_many([word])[0]
    if isinstance(syllabifier, SonorityHierarchy):
        return sonority_syllabify(word, syllabifier)
    return list(syllabifier(word))


def syllabify_line(tokens: Sequence[str], syllabifier: Syllabifier) -> list[Syllable]:
    """Syllables for a token list, numbered 0 for monosyllables and 1..k otherwise."""
    if isinstance(syllabifier, HyphenationModel):
        split = syllabifier.syllabify_many(list(tokens))
    else:
        split = [syllabify_word(tok, syllabifier) for tok in tokens]
    out: list[Syllable] = []
    for k, parts in enumerate(split):
        if len(parts) == 1:
            out.append(Syllable(parts[0], 0, k))
        else:
            out.extend(Syllable(p, i + 1, k) for i, p in enumerate(parts))
    return out


# --- evaluation and gold lists -------------------------------------------------


@dataclass(frozen=True)
class SyllabifierReport:
    word_accuracy: float
    syllable_count_accuracy: float
    n_words: int


def evaluate_syllabifier(gold: Sequence[Sequence[str]],
                         predictions: Sequence[Sequence[str]]) -> SyllabifierReport:
    if len(gold) != len(predictions):
        raise LengthMismatch(f"{len(gold)} gold vs {len(predictions)} predicted words")
    n = len(gold)
    exact = sum(list(g) == list(p) for g, p in zip(gold, predictions))
    count = sum(len(g) == len(p) for g, p in zip(gold, predictions))
    return SyllabifierReport(exact / n if n else 1.0, count / n if n else 1.0, n)


def read_gold_list(text: str) -> list[tuple[str, list[str]]]:
    gold = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        syllables = line.split(SEPARATOR)
        if any(not s for s in syllables):
            raise InconsistentGold(f"line {lineno}: empty syllable in {line!r}")
        gold.append(("".join(syllables), syllables))
    return gold


def write_gold_list(gold: Iterable[tuple[str, Sequence[str]]]) -> str:
    return "".join(SEPARATOR.join(s) + "\n" for _, s in gold)
