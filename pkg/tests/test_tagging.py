from __future__ import annotations

import pytest

from scansion.corpus import parse_tabular
from scansion.crf import TrainConfig
from scansion.errors import DataError, MissingLayer
from scansion.measures import load_catalog
from scansion.metrics import eval_report
from scansion.syllabifier import SonorityHierarchy
from scansion.tagging import (Tagger, assign_measures, line_observations, line_sequence,
                              text_to_lines, train_tagger)

FAST = TrainConfig(epochs=30, dev_fraction=0.0)


@pytest.fixture(scope="module")
def sample_lines():
    from conftest import data_text
    return parse_tabular(data_text("sample.tsv"))


def test_line_observations(ozymandias_text):
    (line,) = parse_tabular(ozymandias_text)
    obs = line_observations(line)
    assert obs[5] == {"form": "Might", "pos_in_word": "1", "dstart": "5", "dend": "4",
                      "pos": line.pos[5]}
    seq = line_sequence(line, "met", "foot_end")
    assert seq.labels[0] == "+|."


def test_tagger_learns_the_sample(sample_lines):
    tagger = train_tagger(sample_lines, "met", config=FAST)
    stripped = [line.replace(met=None, met_line=None, fmsr=None, smsr=None)
                for line in sample_lines]
    tagged = tagger.tag_lines(stripped)
    assert eval_report(sample_lines, tagged, "met").syllable_accuracy >= 0.95
    again = Tagger.loads(tagger.dumps())
    assert again.tag_lines(stripped) == tagged


def test_joint_tagger_fills_both_layers(sample_lines):
    tagger = train_tagger(sample_lines, "met", "foot_end", config=FAST)
    assert len(tagger.crf.labels) == 4
    bare = [line.replace(met=None, met_line=None, fmsr=None, smsr=None, foot_end=None)
            for line in sample_lines]
    out = tagger.tag_lines(bare)
    assert all(x.met is not None and x.foot_end is not None for x in out)
    assert Tagger.loads(tagger.dumps()).aux_layer == "foot_end"


def test_tagger_rejects_line_layers(sample_lines):
    with pytest.raises(DataError):
        train_tagger(sample_lines, "fmsr", config=FAST)
    with pytest.raises(DataError):
        Tagger.loads("#crf-model\t1\n")


def test_assign_measures(ozymandias_text):
    (line,) = parse_tabular(ozymandias_text)
    blank = line.replace(fmsr=None, smsr=None, met_line=None)
    (filled,) = assign_measures([blank])
    assert (filled.fmsr, filled.smsr) == ("iambic.pentameter.invert", "iambic")
    assert filled.met_line == line.met_string
    custom = load_catalog("inverted\t1\t+--+-+-+-+\n")
    assert assign_measures([blank], custom)[0].fmsr == "inverted"
    with pytest.raises(MissingLayer):
        assign_measures([blank.replace(met=None, met_line=None)])


def test_text_to_lines_groups_stanzas():
    text = "Look on my works, ye Mighty!\n\n\nAnd despair.\nOn.\n"
    stanzas = text_to_lines(text, SonorityHierarchy.for_language("en"))
    assert [len(s) for s in stanzas] == [1, 2]
    assert stanzas[0][0].tokens == ["Look", "on", "my", "works", "ye", "Mighty"]
    assert text_to_lines("", SonorityHierarchy.for_language("en")) == []
