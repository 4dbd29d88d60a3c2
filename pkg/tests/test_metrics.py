from __future__ import annotations

import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scansion.corpus import Syllable, VerseLine, parse_tabular
from scansion.errors import LengthMismatch, Misaligned, MissingLayer
from scansion.metrics import (EmptyInput, UnknownLabel, accent_ratio, coarse_tag, cohen_kappa,
                              confusion_matrix, eval_report, kappa_granularities)
from scansion.corpus import ALL_LAYERS

from conftest import data_text


def kappa_from_table(table: np.ndarray) -> float:
    """Kappa straight from a contingency table, independent of the sequence code."""
    n = table.sum()
    p_o = np.trace(table) / n
    p_e = (table.sum(axis=1) @ table.sum(axis=0)) / n ** 2
    return float((p_o - p_e) / (1 - p_e))


# --- kappa ----------------------------------------------------------------------


def test_kappa_examples():
    assert cohen_kappa("+-+-", "+-+-") == 1.0
    assert cohen_kappa(list("++--"), list("+---")) == pytest.approx(0.5, abs=1e-12)
    assert cohen_kappa("+++", "+++") == 1.0
    assert cohen_kappa("+++", "---") == 0.0


def test_kappa_errors():
    with pytest.raises(LengthMismatch):
        cohen_kappa("+", "+-")
    with pytest.raises(EmptyInput):
        cohen_kappa([], [])


@given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc")), min_size=1, max_size=40))
def test_kappa_properties(pairs):
    a = [x for x, _ in pairs]
    b = [y for _, y in pairs]
    k = cohen_kappa(a, b)
    assert -1.0 <= k <= 1.0
    assert k == pytest.approx(cohen_kappa(b, a), abs=1e-12)
    if len(set(a)) > 1:
        assert cohen_kappa(a, a) == 1.0
    table = confusion_matrix(a, b, labels="abc").counts
    p_e = (table.sum(axis=1) @ table.sum(axis=0)) / len(a) ** 2
    if p_e < 1:
        assert k == pytest.approx(kappa_from_table(table), abs=1e-12)


# --- granularities --------------------------------------------------------------


def _line(met, ft=None):
    syls = tuple(Syllable(f"s{i}", 0, i) for i in range(len(met)))
    return VerseLine(syls, met=met, foot_end=ft)


def test_granularities_identical(sample_text):
    lines = parse_tabular(sample_text)
    for layer in ALL_LAYERS:
        if all(layer in x.present_layers() for x in lines):
            rep = kappa_granularities(lines, lines, layer)
            for k in (rep.kappa_syllable, rep.kappa_boundary, rep.kappa_line):
                assert k is None or k == 1.0


def test_one_flip_in_ten_lines():
    a = [_line("-+-+-") for _ in range(10)]
    b = list(a)
    b[3] = _line("++-+-")
    rep = kappa_granularities(a, b, "met")
    # pooled 50 syllables: A has 30 '-' / 20 '+', B has 29 / 21, 49 agree
    p_e = (30 * 29 + 20 * 21) / 50 ** 2
    assert rep.kappa_syllable == pytest.approx((49 / 50 - p_e) / (1 - p_e), abs=1e-12)
    # ten line categories: A all one string, B splits 9/1, so chance agreement is 0.9
    assert rep.kappa_line == pytest.approx(0.0, abs=1e-12)
    assert rep.line_agreement == pytest.approx(0.9)
    assert rep.kappa_boundary is None
    assert rep.confusion.total == 50
    assert rep.n_items == {"line": 10, "syllable": 50}
    binary = kappa_granularities(a, b, "met", line_mode="binary")
    assert binary.kappa_line == pytest.approx(0.9)


def test_disjoint_boundaries():
    a = [_line("-+-+-+", (False, True, False, True, False, True))] * 3
    b = [_line("-+-+-+", (True, False, True, False, True, True))] * 3
    rep = kappa_granularities(a, b, "foot_end")
    assert rep.kappa_boundary <= 0
    assert rep.n_items["boundary"] == 3 * 5
    full = kappa_granularities(a, b, "foot_end", include_final_junction=True)
    assert full.n_items["boundary"] == 3 * 6


def test_bundled_feet_disagree():
    a = parse_tabular(data_text("feet_a.tsv"))
    b = parse_tabular(data_text("feet_b.tsv"))
    rep = kappa_granularities(a, b, "foot_end")
    assert rep.kappa_boundary < 0
    assert kappa_granularities(a, b, "met").kappa_syllable == 1.0


def test_granularity_errors():
    a = [_line("-+")]
    with pytest.raises(Misaligned):
        kappa_granularities(a, [_line("-+-")], "met")
    with pytest.raises(Misaligned):
        kappa_granularities(a, a * 2, "met")
    with pytest.raises(MissingLayer):
        kappa_granularities(a, a, "pos")


def test_report_serializations():
    a = [_line("-+-+-") for _ in range(3)]
    rep = kappa_granularities(a, a, "met")
    doc = json.loads(rep.to_json())
    assert doc["kappa_syllable"] == 1.0 and doc["kappa_boundary"] is None
    text = rep.to_text()
    assert "syllable" in text and "n/a" in text
    assert rep.confusion.to_csv().splitlines()[0] == ",+,-"


# --- confusion ------------------------------------------------------------------


def test_confusion_examples():
    m = confusion_matrix([0, 1, 2], [0, 1, 2])
    assert np.array_equal(m.counts, np.eye(3, dtype=int))
    m = confusion_matrix([2, 2], [1, 1], labels=[0, 1, 2])
    assert m.counts[2, 1] == 2 and m.total == 2
    with pytest.raises(UnknownLabel):
        confusion_matrix([3], [0], labels=[0, 1, 2])


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), max_size=30))
def test_confusion_conserves_items(pairs):
    a = [x for x, _ in pairs]
    b = [y for _, y in pairs]
    m = confusion_matrix(a, b, labels=[0, 1, 2])
    assert m.total == len(pairs)
    assert list(m.counts.sum(axis=1)) == [a.count(k) for k in range(3)]
    assert list(m.counts.sum(axis=0)) == [b.count(k) for k in range(3)]


# --- accent ratio ---------------------------------------------------------------


def _mono_line(tags, met):
    syls = tuple(Syllable(f"w{i}", 0, i) for i in range(len(tags)))
    return VerseLine(syls, met=met, pos=tuple(tags))


def test_accent_ratio_constructed():
    lines = [_mono_line(["NN"], "+")] * 97 + [_mono_line(["NN"], "-")] * 3
    table = accent_ratio(lines)
    assert table.ratio("NN") == pytest.approx(0.97)
    assert table.entries["NN"][1] == 100


def test_accent_ratio_ignores_polysyllables():
    syls = (Syllable("Mor", 1, 0), Syllable("gen", 2, 0))
    line = VerseLine(syls, met="+-", pos=("NN", "NN"))
    assert len(accent_ratio([line])) == 0


def test_accent_ratio_coarsens_tags():
    assert coarse_tag("NN") == "NN" and coarse_tag("VVFIN") == "VV"
    assert coarse_tag("ADJA") == "ADJ" and coarse_tag("ADV") == "ADV"
    table = accent_ratio([_mono_line(["VVFIN", "VVINF", "ART"], "++-")])
    assert table.entries == {"VV": (1.0, 2), "AR": (0.0, 1)}
    assert table.rows()[0][0] == "VV"
    assert "VV" in table.to_text()


def test_accent_ratio_missing_layers():
    with pytest.raises(MissingLayer):
        accent_ratio([VerseLine((Syllable("a"),), met="+")])


@given(st.lists(st.tuples(st.sampled_from(["NN", "ART", "VVFIN"]), st.sampled_from("+-")),
                min_size=1, max_size=20))
def test_accent_ratio_bounds_and_monotone(items):
    lines = [_mono_line([t], m) for t, m in items]
    table = accent_ratio(lines)
    for tag, (ratio, n) in table.entries.items():
        assert 0.0 <= ratio <= 1.0
        more = accent_ratio(lines + [_mono_line([tag], "+")])
        assert more.ratio(coarse_tag(tag)) >= ratio


# --- evaluation -----------------------------------------------------------------


def test_eval_report_perfect(sample_text):
    lines = parse_tabular(sample_text)
    rep = eval_report(lines, lines, "met")
    assert (rep.syllable_accuracy, rep.line_accuracy, rep.macro_f1, rep.micro_f1) == (1, 1, 1, 1)


def test_eval_report_one_error():
    gold = [_line("-+-+-+-+-+"), _line("-+-+-+-+-+")]
    pred = [gold[0], _line("-+-+-+-+--")]
    rep = eval_report(gold, pred, "met")
    assert rep.syllable_accuracy == pytest.approx(0.95)
    assert rep.line_accuracy == pytest.approx(0.5)
    assert rep.micro_f1 == pytest.approx(rep.syllable_accuracy)


def test_macro_is_mean_of_label_f1():
    from scansion.metrics import score_sequences
    # A: tp=2 fp=0 fn=0; B: tp=1 fp=1 fn=1 -> F1 1.0 and 0.5
    rep = score_sequences([["A", "A", "B", "B", "C"]], [["A", "A", "B", "C", "B"]])
    assert rep.per_label["A"].f1 == 1.0 and rep.per_label["B"].f1 == pytest.approx(0.5)
    assert rep.macro_f1 == pytest.approx((1.0 + 0.5 + 0.0) / 3)
    rep = score_sequences([["A", "B", "B"]], [["A", "B", "A"]])
    assert rep.per_label["A"].f1 == pytest.approx(2 / 3)


def test_measure_micro_f1_equals_line_accuracy(sample_text):
    gold = parse_tabular(sample_text)
    pred = [replace(x, fmsr="other", smsr="other") if k % 2 else x for k, x in enumerate(gold)]
    rep = eval_report(gold, pred, "fmsr")
    assert rep.micro_f1 == pytest.approx(rep.line_accuracy)
    assert rep.n_syllables == rep.n_lines == len(gold)
    assert json.loads(rep.to_json())["n_lines"] == len(gold)
    assert "line accuracy" in rep.to_text()
