"""Annotated verse: domain model, text normalization and file formats.

A :class:`VerseLine` is a sequence of syllables with optional parallel
annotation layers (metrical stress, foot boundaries, caesuras, main accents,
part-of-speech) plus line-level measure labels.  Two serializations are
supported:

* a tab-separated tabular format, one syllable per row, one block per line::

    # tok	met	ft	pos	syll	csr	main	smsr	measure	met_line
    1	Look	+	.	VB	0	.	1	iambic	iambic.pentameter.invert	+--+-+-+-+
    ...

* a JSON poem collection (``{"poems": [...]}``) that also keeps stanza
  structure and poem metadata.

Both writers are canonical: ``write(parse(text)) == text`` for documents the
writer produced.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

from .errors import DataError, MissingLayer

log = logging.getLogger(__name__)

__all__ = [
    "StressMark", "Syllable", "VerseLine", "Poem",
    "TabularError", "MalformedRow", "IndexGap", "UnknownSymbol",
    "InconsistentLayers", "SchemaViolation",
    "normalize_text", "tokenize_line", "strip_punctuation", "is_punctuation",
    "parse_tabular", "write_tabular", "read_poems_json", "write_poems_json",
    "line_warnings", "TABULAR_COLUMNS",
]


class TabularError(DataError):
    pass


class MalformedRow(TabularError):
    pass


class IndexGap(TabularError):
    pass


class UnknownSymbol(TabularError):
    pass


class InconsistentLayers(DataError):
    pass


class SchemaViolation(DataError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class StressMark(str, Enum):
    STRESSED = "+"
    UNSTRESSED = "-"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Syllable:
    text: str
    pos_in_word: int = 0
    token_index: int = 0

    def __post_init__(self):
        if not self.text:
            raise DataError("syllable text must be non-empty")
        if self.pos_in_word < 0 or self.token_index < 0:
            raise DataError(f"negative position in syllable {self.text!r}")


# Per-syllable layers, in canonical column order.
SYLLABLE_LAYERS = ("met", "foot_end", "caesura_after", "main_accent", "pos")
LINE_LAYERS = ("fmsr", "smsr", "met_line")


def _check_token_runs(syllables: Sequence[Syllable]) -> None:
    prev_token = -1
    prev_pos = 0
    for i, syl in enumerate(syllables):
        if syl.token_index == prev_token:
            if prev_pos == 0 or syl.pos_in_word != prev_pos + 1:
                raise DataError(
                    f"syllable {i} ({syl.text!r}): pos_in_word {syl.pos_in_word} "
                    f"does not continue token {syl.token_index}")
        elif syl.token_index == prev_token + 1:
            if syl.pos_in_word not in (0, 1):
                raise DataError(
                    f"syllable {i} ({syl.text!r}) starts token {syl.token_index} "
                    f"at pos_in_word {syl.pos_in_word}")
        else:
            raise DataError(f"syllable {i}: token_index jumps from {prev_token} "
                            f"to {syl.token_index}")
        # a word of exactly one syllable must use 0, not 1
        if prev_pos == 1 and syl.token_index != prev_token:
            raise DataError(f"token {prev_token} has a single syllable numbered 1")
        prev_token, prev_pos = syl.token_index, syl.pos_in_word
    if prev_pos == 1:
        raise DataError(f"token {prev_token} has a single syllable numbered 1")


@dataclass(frozen=True)
class VerseLine:
    """One verse line; every present layer has one entry per syllable."""

    syllables: tuple[Syllable, ...]
    met: tuple[StressMark, ...] | None = None
    foot_end: tuple[bool, ...] | None = None
    caesura_after: tuple[bool, ...] | None = None
    main_accent: tuple[int, ...] | None = None
    pos: tuple[str, ...] | None = None
    fmsr: str | None = None
    smsr: str | None = None
    met_line: str | None = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "syllables", tuple(self.syllables))
        if self.met is not None:
            set_(self, "met", tuple(StressMark(m) for m in self.met))
        for name in ("foot_end", "caesura_after"):
            value = getattr(self, name)
            if value is not None:
                set_(self, name, tuple(bool(v) for v in value))
        if self.main_accent is not None:
            accents = tuple(int(v) for v in self.main_accent)
            if any(a not in (0, 1, 2) for a in accents):
                raise DataError(f"main accents must be 0, 1 or 2: {accents}")
            set_(self, "main_accent", accents)
        if self.pos is not None:
            set_(self, "pos", tuple(self.pos))
        n = len(self.syllables)
        for name in SYLLABLE_LAYERS:
            value = getattr(self, name)
            if value is not None and len(value) != n:
                raise DataError(f"layer {name} has {len(value)} entries for {n} syllables")
        _check_token_runs(self.syllables)
        if self.met is not None and self.met_line is not None:
            if self.met_line != self.met_string:
                raise DataError(f"met_line {self.met_line!r} disagrees with met "
                                f"{self.met_string!r}")
        if self.fmsr is not None and self.smsr is not None:
            from .measures import smsr_of
            if smsr_of(self.fmsr) != self.smsr:
                raise DataError(f"smsr {self.smsr!r} is not the head of {self.fmsr!r}")

    def __len__(self) -> int:
        return len(self.syllables)

    @property
    def met_string(self) -> str | None:
        if self.met is None:
            return None
        return "".join(m.value for m in self.met)

    @property
    def tokens(self) -> list[str]:
        words: list[str] = []
        current = -1
        for syl in self.syllables:
            if syl.token_index != current:
                words.append(syl.text)
                current = syl.token_index
            else:
                words[-1] += syl.text
        return words

    def present_layers(self) -> tuple[str, ...]:
        return tuple(name for name in SYLLABLE_LAYERS + LINE_LAYERS
                     if getattr(self, name) is not None)

    def replace(self, **changes) -> "VerseLine":
        values = {name: getattr(self, name) for name in
                  ("syllables",) + SYLLABLE_LAYERS + LINE_LAYERS}
        values.update(changes)
        return VerseLine(**values)


def line_warnings(line: VerseLine) -> list[str]:
    """Soft checks that never reject a line."""
    warnings = []
    if line.foot_end is not None and line.foot_end and not line.foot_end[-1]:
        warnings.append("final syllable carries no foot boundary")
    return warnings


META_KEYS = ("author", "title", "year", "period", "language", "source_id")


@dataclass(frozen=True)
class Poem:
    lines: tuple[VerseLine, ...]
    stanza_breaks: frozenset[int] = frozenset()
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "stanza_breaks", frozenset(self.stanza_breaks))
        object.__setattr__(self, "meta", dict(self.meta))
        for b in self.stanza_breaks:
            if not 0 < b < len(self.lines):
                raise DataError(f"stanza break {b} outside (0, {len(self.lines)})")
        for key in self.meta:
            if key not in META_KEYS:
                raise DataError(f"unknown metadata key {key!r}")

    @property
    def stanzas(self) -> list[tuple[VerseLine, ...]]:
        cuts = [0, *sorted(self.stanza_breaks), len(self.lines)]
        return [self.lines[a:b] for a, b in zip(cuts, cuts[1:]) if b > a]


# --- text ------------------------------------------------------------------

_ORTHOGRAPHIC = str.maketrans({"ſ": "s", "ꝛ": "r"})
APOSTROPHES = "'’ʼ"


def normalize_text(raw: str) -> str:
    """Replace long s and r rotunda, return NFC text."""
    decomposed = unicodedata.normalize("NFD", raw)
    return unicodedata.normalize("NFC", decomposed.translate(_ORTHOGRAPHIC))


def _wordlike(ch: str) -> bool:
    return ch.isalnum()


def tokenize_line(text: str) -> list[str]:
    """Whitespace tokenization with edge punctuation split off.

    Apostrophes touching a letter stay with their word (``despair'``,
    ``'tis``, ``o'er``).
    """
    tokens: list[str] = []
    for chunk in text.split():
        i, j = 0, len(chunk)
        while i < j and not _wordlike(chunk[i]) and not (
                chunk[i] in APOSTROPHES and i + 1 < j and _wordlike(chunk[i + 1])):
            i += 1
        while j > i and not _wordlike(chunk[j - 1]) and not (
                chunk[j - 1] in APOSTROPHES and j - 2 >= i and _wordlike(chunk[j - 2])):
            j -= 1
        tokens.extend(chunk[:i])
        if i < j:
            tokens.append(chunk[i:j])
        tokens.extend(chunk[j:])
    return tokens


def is_punctuation(token: str) -> bool:
    return not any(_wordlike(ch) for ch in token)


def strip_punctuation(tokens: Iterable[str]) -> list[str]:
    return [tok for tok in tokens if not is_punctuation(tok)]


# --- tabular format ------------------------------------------------------------

TABULAR_COLUMNS = ("tok", "met", "ft", "pos", "syll", "csr", "main",
                   "smsr", "measure", "met_line")
_COLUMN_LAYER = {"met": "met", "ft": "foot_end", "pos": "pos", "csr": "caesura_after",
                 "main": "main_accent", "smsr": "smsr", "measure": "fmsr",
                 "met_line": "met_line"}
_LAYER_COLUMN = {v: k for k, v in _COLUMN_LAYER.items()}
_BOUNDARY = {".": False, ":": True}


def _parse_header(line: str, lineno: int) -> list[str]:
    if not line.startswith("#"):
        raise MalformedRow(f"line {lineno}: expected '#' header, got {line!r}")
    columns = line[1:].strip().split("\t")
    columns = [c.strip() for c in columns]
    if not columns or columns[0] != "tok":
        raise MalformedRow(f"line {lineno}: header must start with 'tok'")
    for c in columns:
        if c not in TABULAR_COLUMNS:
            raise MalformedRow(f"line {lineno}: unknown column {c!r}")
    if len(set(columns)) != len(columns):
        raise MalformedRow(f"line {lineno}: duplicate column in header")
    return columns


def _build_line(columns: list[str], rows: list[tuple[int, list[str]]]) -> VerseLine:
    for expected, (lineno, fields) in enumerate(rows, start=1):
        try:
            idx = int(fields[0])
        except ValueError:
            raise MalformedRow(f"line {lineno}: row index {fields[0]!r} is not an integer")
        if idx != expected:
            raise IndexGap(f"line {lineno}: row index {idx}, expected {expected}")
    cells = {name: [fields[k + 1] for _, fields in rows] for k, name in enumerate(columns)}
    first_row = rows[0][0]

    def symbols(name: str, allowed: Mapping[str, Any]) -> list[Any]:
        out = []
        for offset, value in enumerate(cells[name]):
            if value not in allowed:
                raise UnknownSymbol(f"line {first_row + offset}: {name} value {value!r} "
                                    f"not in {sorted(allowed)}")
            out.append(allowed[value])
        return out

    if "syll" in cells:
        syllables = []
        token = -1
        for offset, (text, raw) in enumerate(zip(cells["tok"], cells["syll"])):
            try:
                p = int(raw)
            except ValueError:
                raise MalformedRow(f"line {first_row + offset}: syll {raw!r} is not an integer")
            if p in (0, 1):
                token += 1
            syllables.append(Syllable(text, p, max(token, 0)))
    else:
        syllables = [Syllable(text, 0, k) for k, text in enumerate(cells["tok"])]

    layers: dict[str, Any] = {}
    if "met" in cells:
        layers["met"] = symbols("met", {"+": StressMark.STRESSED, "-": StressMark.UNSTRESSED})
    if "ft" in cells:
        layers["foot_end"] = symbols("ft", _BOUNDARY)
    if "csr" in cells:
        layers["caesura_after"] = symbols("csr", _BOUNDARY)
    if "main" in cells:
        layers["main_accent"] = symbols("main", {"0": 0, "1": 1, "2": 2})
    if "pos" in cells:
        layers["pos"] = cells["pos"]
    for name in ("smsr", "measure", "met_line"):
        if name in cells:
            values = set(cells[name])
            if len(values) != 1:
                raise MalformedRow(f"line {first_row}: column {name} varies within a "
                                   f"verse line: {sorted(values)}")
            value = values.pop()
            if value:  # a blank cell means the line is not annotated
                layers[_COLUMN_LAYER[name]] = value
    try:
        return VerseLine(tuple(syllables), **layers)
    except TabularError:
        raise
    except DataError as exc:
        raise MalformedRow(f"line {first_row}: {exc}") from exc


def parse_tabular(text: str) -> list[VerseLine]:
    """Parse a tabular document into verse lines."""
    physical = text.split("\n")
    columns: list[str] | None = None
    lines: list[VerseLine] = []
    block: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(physical, start=1):
        raw = raw.rstrip("\r")
        if columns is None:
            if raw.strip():
                columns = _parse_header(raw, lineno)
            continue
        if not raw.strip():
            if block:
                lines.append(_build_line(columns, block))
                block = []
            continue
        if raw.startswith("#"):
            raise MalformedRow(f"line {lineno}: unexpected comment inside data")
        fields = raw.split("\t")
        if len(fields) != len(columns) + 1:
            raise MalformedRow(f"line {lineno}: {len(fields)} fields, "
                               f"expected {len(columns) + 1}")
        block.append((lineno, fields))
    if block:
        lines.append(_build_line(columns, block))
    return lines


def _columns_for(layers: tuple[str, ...]) -> list[str]:
    present = {_LAYER_COLUMN[name] for name in layers}
    return [c for c in TABULAR_COLUMNS if c in ("tok", "syll") or c in present]


def write_tabular(lines: Sequence[VerseLine]) -> str:
    """Serialize lines; all lines must carry the same layers."""
    layers = lines[0].present_layers() if lines else ()
    for k, line in enumerate(lines):
        if line.present_layers() != layers:
            raise InconsistentLayers(f"line {k} has layers {line.present_layers()}, "
                                     f"line 0 has {layers}")
    columns = _columns_for(layers)
    out = ["# " + "\t".join(columns) + "\n"]
    for line in lines:
        for i, syl in enumerate(line.syllables):
            values = []
            for c in columns:
                if c == "tok":
                    values.append(syl.text)
                elif c == "syll":
                    values.append(str(syl.pos_in_word))
                elif c == "met":
                    values.append(line.met[i].value)
                elif c == "ft":
                    values.append(":" if line.foot_end[i] else ".")
                elif c == "csr":
                    values.append(":" if line.caesura_after[i] else ".")
                elif c == "main":
                    values.append(str(line.main_accent[i]))
                elif c == "pos":
                    values.append(line.pos[i])
                else:
                    values.append(getattr(line, _COLUMN_LAYER[c]))
            out.append(f"{i + 1}\t" + "\t".join(values) + "\n")
        out.append("\n")
    return "".join(out)


# --- JSON poem collection ------------------------------------------------------


def _line_to_json(line: VerseLine) -> dict[str, Any]:
    obj: dict[str, Any] = {"syllables": [
        {"text": s.text, "pos_in_word": s.pos_in_word, "token_index": s.token_index}
        for s in line.syllables]}
    if line.met is not None:
        obj["met"] = line.met_string
    if line.foot_end is not None:
        obj["ft"] = "".join("1" if b else "0" for b in line.foot_end)
    if line.caesura_after is not None:
        obj["csr"] = "".join("1" if b else "0" for b in line.caesura_after)
    if line.main_accent is not None:
        obj["main"] = "".join(str(a) for a in line.main_accent)
    if line.pos is not None:
        obj["pos"] = list(line.pos)
    for name in LINE_LAYERS:
        if getattr(line, name) is not None:
            obj[name] = getattr(line, name)
    return obj


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaViolation(path, message)


def _layer_string(obj: Mapping, key: str, alphabet: str, path: str) -> str | None:
    if key not in obj:
        return None
    value = obj[key]
    _expect(isinstance(value, str), f"{path}.{key}", "must be a string")
    bad = set(value) - set(alphabet)
    _expect(not bad, f"{path}.{key}", f"symbols {sorted(bad)} outside {alphabet!r}")
    return value


_LINE_KEYS = {"syllables", "met", "ft", "csr", "main", "pos", "fmsr", "smsr", "met_line"}


def _line_from_json(obj: Any, path: str) -> VerseLine:
    _expect(isinstance(obj, dict), path, "verse line must be an object")
    extra = set(obj) - _LINE_KEYS
    _expect(not extra, path, f"unknown keys {sorted(extra)}")
    _expect("syllables" in obj, path, "missing 'syllables'")
    raw_syls = obj["syllables"]
    _expect(isinstance(raw_syls, list), f"{path}.syllables", "must be a list")
    syllables = []
    for k, s in enumerate(raw_syls):
        spath = f"{path}.syllables[{k}]"
        _expect(isinstance(s, dict), spath, "syllable must be an object")
        _expect(set(s) == {"text", "pos_in_word", "token_index"}, spath,
                "syllable needs exactly text, pos_in_word, token_index")
        _expect(isinstance(s["text"], str) and s["text"] != "", f"{spath}.text",
                "must be a non-empty string")
        for key in ("pos_in_word", "token_index"):
            _expect(isinstance(s[key], int) and not isinstance(s[key], bool)
                    and s[key] >= 0, f"{spath}.{key}", "must be a non-negative integer")
        syllables.append(Syllable(s["text"], s["pos_in_word"], s["token_index"]))
    layers: dict[str, Any] = {}
    met = _layer_string(obj, "met", "+-", path)
    if met is not None:
        layers["met"] = tuple(StressMark(m) for m in met)
    for key, name in (("ft", "foot_end"), ("csr", "caesura_after")):
        value = _layer_string(obj, key, "01", path)
        if value is not None:
            layers[name] = tuple(v == "1" for v in value)
    main = _layer_string(obj, "main", "012", path)
    if main is not None:
        layers["main_accent"] = tuple(int(v) for v in main)
    if "pos" in obj:
        _expect(isinstance(obj["pos"], list) and all(isinstance(p, str) for p in obj["pos"]),
                f"{path}.pos", "must be a list of strings")
        layers["pos"] = tuple(obj["pos"])
    for name in LINE_LAYERS:
        if name in obj:
            _expect(isinstance(obj[name], str), f"{path}.{name}", "must be a string")
            layers[name] = obj[name]
    try:
        return VerseLine(tuple(syllables), **layers)
    except DataError as exc:
        raise SchemaViolation(path, str(exc)) from exc


def read_poems_json(text: str) -> list[Poem]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict):
        _expect(set(doc) == {"poems"}, "$", "top-level object must have exactly 'poems'")
        poems_raw, root = doc["poems"], "$.poems"
    else:
        poems_raw, root = doc, "$"
    _expect(isinstance(poems_raw, list), root, "must be a list of poems")
    poems = []
    for p, raw in enumerate(poems_raw):
        path = f"{root}[{p}]"
        _expect(isinstance(raw, dict), path, "poem must be an object")
        extra = set(raw) - {"meta", "stanzas"}
        _expect(not extra, path, f"unknown keys {sorted(extra)}")
        _expect("stanzas" in raw, path, "missing 'stanzas'")
        meta = raw.get("meta", {})
        _expect(isinstance(meta, dict), f"{path}.meta", "must be an object")
        for key, value in meta.items():
            _expect(key in META_KEYS, f"{path}.meta.{key}", "unknown metadata key")
            _expect(isinstance(value, str), f"{path}.meta.{key}", "must be a string")
        stanzas = raw["stanzas"]
        _expect(isinstance(stanzas, list), f"{path}.stanzas", "must be a list")
        lines: list[VerseLine] = []
        breaks = set()
        for s, stanza in enumerate(stanzas):
            spath = f"{path}.stanzas[{s}]"
            _expect(isinstance(stanza, list) and stanza, spath,
                    "stanza must be a non-empty list of lines")
            if s > 0:
                breaks.add(len(lines))
            for k, line in enumerate(stanza):
                lines.append(_line_from_json(line, f"{spath}[{k}]"))
        poems.append(Poem(tuple(lines), frozenset(breaks), meta))
    return poems


def write_poems_json(poems: Sequence[Poem]) -> str:
    doc = {"poems": [
        {"meta": {k: poem.meta[k] for k in META_KEYS if k in poem.meta},
         "stanzas": [[_line_to_json(line) for line in stanza] for stanza in poem.stanzas]}
        for poem in poems]}
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


# --- layers as string labels -------------------------------------------------------

ALL_LAYERS = SYLLABLE_LAYERS + LINE_LAYERS
_DECODE = {
    "met": StressMark,
    "foot_end": lambda s: _BOUNDARY[s],
    "caesura_after": lambda s: _BOUNDARY[s],
    "main_accent": int,
    "pos": str,
}


def _encode(layer: str, value: Any) -> str:
    if layer == "met":
        return value.value
    if layer in ("foot_end", "caesura_after"):
        return ":" if value else "."
    return str(value)


def layer_labels(line: VerseLine, layer: str) -> list[str]:
    """A layer as string labels in tabular notation; line layers give one item."""
    if layer not in ALL_LAYERS:
        raise DataError(f"unknown layer {layer!r}")
    value = getattr(line, layer)
    if value is None:
        raise MissingLayer(f"line has no {layer} layer")
    if layer in LINE_LAYERS:
        return [value]
    return [_encode(layer, v) for v in value]


def with_layer_labels(line: VerseLine, layer: str, labels: Sequence[str]) -> VerseLine:
    """Inverse of :func:`layer_labels`."""
    if layer not in ALL_LAYERS:
        raise DataError(f"unknown layer {layer!r}")
    if layer in LINE_LAYERS:
        (value,) = labels
        return line.replace(**{layer: value})
    try:
        decoded = tuple(_DECODE[layer](s) for s in labels)
    except (KeyError, ValueError):
        raise UnknownSymbol(f"labels {list(labels)} are not valid for layer {layer}")
    return line.replace(**{layer: decoded})
