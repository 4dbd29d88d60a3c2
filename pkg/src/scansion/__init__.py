"""Scansion toolkit: verse corpora, syllabification, CRF meter tagging,
verse-measure classification and annotator agreement."""

from .corpus import (Poem, StressMark, Syllable, VerseLine, normalize_text, parse_tabular,
                     read_poems_json, strip_punctuation, tokenize_line, write_poems_json,
                     write_tabular)
from .crf import CrfModel, TrainConfig, train
from .errors import DataError
from .measures import builtin_catalog, classify_line, load_catalog
from .metrics import accent_ratio, cohen_kappa, eval_report, kappa_granularities
from .syllabifier import SonorityHierarchy, sonority_syllabify, train_hyphenator
from .tagging import Tagger, assign_measures, train_tagger

__all__ = [
    "Poem", "StressMark", "Syllable", "VerseLine", "normalize_text", "parse_tabular",
    "read_poems_json", "strip_punctuation", "tokenize_line", "write_poems_json",
    "write_tabular", "CrfModel", "TrainConfig", "train", "DataError", "builtin_catalog",
    "classify_line", "load_catalog", "accent_ratio", "cohen_kappa", "eval_report",
    "kappa_granularities", "SonorityHierarchy", "sonority_syllabify", "train_hyphenator",
    "Tagger", "assign_measures", "train_tagger",
]
