"""Verse-measure pattern language, compiler and catalog."""

from .automaton import Matcher, compile_matcher
from .catalog import (
    CLASSIFY_ORDER, FEET, HISTORICAL_NAMES, LENGTHS, MODIFIERS, OTHER, STUB_FORMS,
    BadSymbol, CatalogError, EmptyMeter, MeasureCatalog, MeasurePattern,
    UnsupportedModifier, apply_modifier, builtin_catalog, classify_line,
    dump_catalog, family_dsl, load_catalog, measure_frequencies, smsr_of,
)
from .dsl import ParseError, PatternAst, compile_pattern, expand, interpret, to_dsl

__all__ = [
    "Matcher", "compile_matcher", "CLASSIFY_ORDER", "FEET", "HISTORICAL_NAMES",
    "LENGTHS", "MODIFIERS", "OTHER", "STUB_FORMS", "BadSymbol", "CatalogError",
    "EmptyMeter", "MeasureCatalog", "MeasurePattern", "UnsupportedModifier",
    "apply_modifier", "builtin_catalog", "classify_line", "dump_catalog",
    "family_dsl", "load_catalog", "measure_frequencies", "smsr_of", "ParseError",
    "PatternAst", "compile_pattern", "expand", "interpret", "to_dsl",
]
