"""Agreement, tagging accuracy and corpus statistics."""

from __future__ import annotations

import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import LINE_LAYERS, Poem, VerseLine, layer_labels
from .errors import DataError, LengthMismatch, Misaligned, MissingLayer

BOUNDARY_LAYERS = ("foot_end", "caesura_after")


class EmptyInput(DataError):
    pass


class UnknownLabel(DataError):
    pass


class LabelMismatch(Misaligned):
    pass


# --- kappa ---------------------------------------------------------------------


def cohen_kappa(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Cohen's kappa of two aligned annotations.

    When chance agreement is 1 (both annotators used a single label) the
    statistic is undefined; we return 1.0 if the sequences agree everywhere
    and 0.0 otherwise.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)} items")
    n = len(a)
    if n == 0:
        raise EmptyInput("kappa of zero items")
    p_o = sum(x == y for x, y in zip(a, b)) / n
    ca, cb = Counter(a), Counter(b)
    p_e = sum(ca[k] * cb[k] for k in ca) / (n * n)
    if p_e >= 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


@dataclass(frozen=True)
class ConfusionMatrix:
    """``counts[i, j]``: items labeled ``labels[i]`` by one side and ``labels[j]`` by the other."""

    labels: tuple[str, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("," + ",".join(self.labels) + "\n")
        for lab, row in zip(self.labels, self.counts):
            buf.write(lab + "," + ",".join(str(int(c)) for c in row) + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": self.counts.astype(int).tolist()}


def confusion_matrix(a: Sequence[Hashable], b: Sequence[Hashable],
                     labels: Sequence[Hashable] | None = None) -> ConfusionMatrix:
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)} items")
    if labels is None:
        labels = sorted(set(a) | set(b), key=str)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for x, y in zip(a, b):
        if x not in index or y not in index:
            raise UnknownLabel(f"label {x if x not in index else y!r} not in label set")
        counts[index[x], index[y]] += 1
    return ConfusionMatrix(tuple(str(lab) for lab in labels), counts)


def _flatten_lines(corpus: Iterable[VerseLine | Poem]) -> list[VerseLine]:
    lines: list[VerseLine] = []
    for item in corpus:
        lines.extend(item.lines if isinstance(item, Poem) else [item])
    return lines


def _align(a: Sequence[VerseLine], b: Sequence[VerseLine]) -> None:
    if len(a) != len(b):
        raise Misaligned(f"{len(a)} lines vs {len(b)} lines")
    for k, (x, y) in enumerate(zip(a, b)):
        if [s.text for s in x.syllables] != [s.text for s in y.syllables]:
            raise Misaligned(f"line {k}: syllables differ")


@dataclass(frozen=True)
class AgreementReport:
    layer: str
    kappa_syllable: float | None
    kappa_boundary: float | None
    kappa_line: float
    line_agreement: float
    confusion: ConfusionMatrix | None
    n_items: Mapping[str, int] = field(default_factory=dict)
    line_mode: str = "exact"

    def to_dict(self) -> dict:
        return {"layer": self.layer, "kappa_syllable": self.kappa_syllable,
                "kappa_boundary": self.kappa_boundary, "kappa_line": self.kappa_line,
                "line_agreement": self.line_agreement, "line_mode": self.line_mode,
                "n_items": dict(self.n_items),
                "confusion": self.confusion.to_dict() if self.confusion else None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        def fmt(v):
            return "n/a" if v is None else f"{v:.4f}"
        rows = [("granularity", "kappa", "items"),
                ("syllable", fmt(self.kappa_syllable), str(self.n_items.get("syllable", 0))),
                ("boundary", fmt(self.kappa_boundary), str(self.n_items.get("boundary", 0))),
                ("line", fmt(self.kappa_line), str(self.n_items.get("line", 0)))]
        out = [f"layer: {self.layer}"] + _columns(rows)
        out.append(f"identical lines: {self.line_agreement:.4f}")
        return "\n".join(out) + "\n"


def _columns(rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def kappa_granularities(annot_a: Iterable[VerseLine | Poem], annot_b: Iterable[VerseLine | Poem],
                        layer: str, include_final_junction: bool = False,
                        line_mode: str = "exact") -> AgreementReport:
    """Agreement on one layer, per syllable, per junction and per whole line.

    Junctions exist only for boundary layers (foot, caesura): junction ``j``
    is the flag after syllable ``j``.  ``line_mode="exact"`` treats every full
    annotation string as a category; ``"binary"`` reports the share of lines
    annotated identically, since match/mismatch coding leaves a single vector.
    """
    if line_mode not in ("exact", "binary"):
        raise DataError(f"line_mode must be 'exact' or 'binary', got {line_mode!r}")
    a, b = _flatten_lines(annot_a), _flatten_lines(annot_b)
    _align(a, b)
    if not a:
        raise EmptyInput("no lines to compare")
    la = [layer_labels(x, layer) for x in a]
    lb = [layer_labels(y, layer) for y in b]
    line_a = ["\x1f".join(x) for x in la]
    line_b = ["\x1f".join(y) for y in lb]
    line_agreement = sum(x == y for x, y in zip(line_a, line_b)) / len(a)
    kappa_line = cohen_kappa(line_a, line_b) if line_mode == "exact" else line_agreement
    n_items = {"line": len(a)}

    kappa_syllable = kappa_boundary = None
    confusion = None
    if layer not in LINE_LAYERS:
        sa = [s for x in la for s in x]
        sb = [s for y in lb for s in y]
        n_items["syllable"] = len(sa)
        if sa:
            kappa_syllable = cohen_kappa(sa, sb)
            confusion = confusion_matrix(sa, sb)
    if layer in BOUNDARY_LAYERS:
        cut = 0 if include_final_junction else 1
        ja = [s for x in la for s in x[:len(x) - cut]]
        jb = [s for y in lb for s in y[:len(y) - cut]]
        n_items["boundary"] = len(ja)
        if ja:
            kappa_boundary = cohen_kappa(ja, jb)
    return AgreementReport(layer, kappa_syllable, kappa_boundary, kappa_line,
                           line_agreement, confusion, n_items, line_mode)


# --- accent ratio --------------------------------------------------------------


def coarse_tag(tag: str) -> str:
    """First two characters; adjective and adverb tags keep a third (ADJ vs ADV)."""
    return tag[:3] if tag.startswith("AD") else tag[:2]


@dataclass(frozen=True)
class AccentRatioTable:
    entries: Mapping[str, tuple[float, int]]

    def ratio(self, tag: str) -> float:
        return self.entries[tag][0]

    def __len__(self) -> int:
        return len(self.entries)

    def rows(self) -> list[tuple[str, float, int]]:
        """Most frequent tags first."""
        return sorted(((t, r, n) for t, (r, n) in self.entries.items()),
                      key=lambda row: (-row[2], row[0]))

    def to_text(self) -> str:
        rows = [("pos", "ratio", "n")] + [(t, f"{r:.3f}", str(n)) for t, r, n in self.rows()]
        return "\n".join(_columns(rows)) + "\n"

    def to_dict(self) -> dict:
        return {t: {"ratio": r, "n": n} for t, r, n in self.rows()}


def accent_ratio(corpus: Iterable[VerseLine | Poem], coarsen=coarse_tag) -> AccentRatioTable:
    """Share of stressed occurrences per POS tag, monosyllabic words only."""
    stressed: Counter[str] = Counter()
    total: Counter[str] = Counter()
    for k, line in enumerate(_flatten_lines(corpus)):
        if line.met is None or line.pos is None:
            raise MissingLayer(f"line {k} needs met and pos layers")
        n = len(line)
        for i, syl in enumerate(line.syllables):
            if syl.pos_in_word != 0:
                continue
            # a zero index could still open a longer word if the next syllable continues it
            if i + 1 < n and line.syllables[i + 1].token_index == syl.token_index:
                continue
            tag = coarsen(line.pos[i])
            total[tag] += 1
            stressed[tag] += line.met[i].value == "+"
    return AccentRatioTable({t: (stressed[t] / total[t], total[t]) for t in sorted(total)})


# --- tagging accuracy ----------------------------------------------------------


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    syllable_accuracy: float
    line_accuracy: float
    per_label: Mapping[str, LabelScore]
    macro_f1: float
    micro_f1: float
    n_syllables: int
    n_lines: int

    def to_dict(self) -> dict:
        return {"syllable_accuracy": self.syllable_accuracy,
                "line_accuracy": self.line_accuracy,
                "macro_f1": self.macro_f1, "micro_f1": self.micro_f1,
                "n_syllables": self.n_syllables, "n_lines": self.n_lines,
                "per_label": {k: vars(v) for k, v in self.per_label.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        rows = [("label", "precision", "recall", "f1", "support")]
        for lab, s in self.per_label.items():
            rows.append((lab, f"{s.precision:.4f}", f"{s.recall:.4f}", f"{s.f1:.4f}", str(s.support)))
        head = [f"syllable accuracy: {self.syllable_accuracy:.4f} ({self.n_syllables} items)",
                f"line accuracy:     {self.line_accuracy:.4f} ({self.n_lines} lines)",
                f"macro F1:          {self.macro_f1:.4f}",
                f"micro F1:          {self.micro_f1:.4f}"]
        return "\n".join(head + _columns(rows)) + "\n"


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def score_sequences(gold: Sequence[Sequence[str]], pred: Sequence[Sequence[str]]) -> EvalReport:
    if len(gold) != len(pred):
        raise LabelMismatch(f"{len(gold)} gold vs {len(pred)} predicted sequences")
    tp: Counter[str] = Counter()
    fp: Counter[str] = Counter()
    fn: Counter[str] = Counter()
    right = total = lines_right = 0
    for k, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise LabelMismatch(f"sequence {k}: {len(g)} gold vs {len(p)} predicted labels")
        ok = True
        for x, y in zip(g, p):
            total += 1
            if x == y:
                right += 1
                tp[x] += 1
            else:
                ok = False
                fn[x] += 1
                fp[y] += 1
        lines_right += ok
    labels = sorted(set(tp) | set(fp) | set(fn))
    per_label = {}
    for lab in labels:
        p = tp[lab] / (tp[lab] + fp[lab]) if tp[lab] + fp[lab] else 0.0
        r = tp[lab] / (tp[lab] + fn[lab]) if tp[lab] + fn[lab] else 0.0
        per_label[lab] = LabelScore(p, r, _f1(p, r), tp[lab] + fn[lab])
    sum_tp, sum_fp, sum_fn = sum(tp.values()), sum(fp.values()), sum(fn.values())
    micro_p = sum_tp / (sum_tp + sum_fp) if sum_tp + sum_fp else 0.0
    micro_r = sum_tp / (sum_tp + sum_fn) if sum_tp + sum_fn else 0.0
    macro = float(np.mean([s.f1 for s in per_label.values()])) if per_label else 1.0
    return EvalReport(
        syllable_accuracy=right / total if total else 1.0,
        line_accuracy=lines_right / len(gold) if gold else 1.0,
        per_label=per_label,
        macro_f1=macro,
        micro_f1=_f1(micro_p, micro_r) if total else 1.0,
        n_syllables=total,
        n_lines=len(gold),
    )


def eval_report(gold: Iterable[VerseLine | Poem], predicted: Iterable[VerseLine | Poem],
                layer: str) -> EvalReport:
    """Score one layer of ``predicted`` against ``gold``.

    Line-level layers (measures) count each line as a single item, so
    syllable accuracy, line accuracy and micro F1 coincide.
    """
    g, p = _flatten_lines(gold), _flatten_lines(predicted)
    _align(g, p)
    return score_sequences([layer_labels(x, layer) for x in g],
                           [layer_labels(y, layer) for y in p])
