"""Command line front end.

Exit status: 0 on success, 1 on usage errors, 2 on data errors.  Data goes
to ``--output`` (default stdout); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .corpus import (Poem, normalize_text, parse_tabular, read_poems_json, strip_punctuation,
                     tokenize_line, write_poems_json, write_tabular)
from .crf import TrainConfig
from .errors import DataError
from .measures import MeasureCatalog, builtin_catalog, load_catalog, measure_frequencies
from .metrics import accent_ratio, eval_report, kappa_granularities
from .syllabifier import (HyphenationModel, SonorityHierarchy, evaluate_syllabifier,
                          read_gold_list, train_hyphenator)
from .tagging import TAGGABLE, Tagger, assign_measures, text_to_lines, train_tagger

log = logging.getLogger("scansion")

COMMANDS = ("normalize", "tokenize", "syllabify", "train-syll", "train-tagger", "tag",
            "measure", "eval", "agree", "stats", "pipeline")
CONFIG_KEYS = {"input", "output", "model", "syll_model", "catalog", "gold", "lang", "seed",
               "format", "epochs", "l2", "layer", "aux_layer"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliConfig:
    command: str
    input: str | None = None
    output: str | None = None
    model: str | None = None
    syll_model: str | None = None
    catalog: str | None = None
    gold: str | None = None
    lang: str = "en"
    seed: int = 42
    format: str = "tabular"
    epochs: int = 50
    l2: float = 1e-4
    layer: str = "met"
    aux_layer: str | None = None

    def validate(self) -> None:
        if self.lang not in ("en", "de"):
            raise UsageError(f"--lang must be en or de, got {self.lang!r}")
        if self.format not in ("tabular", "json"):
            raise UsageError(f"--format must be tabular or json, got {self.format!r}")
        if self.epochs < 1:
            raise UsageError("--epochs must be at least 1")
        if self.l2 < 0:
            raise UsageError("--l2 must be non-negative")
        for name in ("input", "model", "syll_model", "catalog", "gold"):
            path = getattr(self, name)
            if path is not None and path != "-" and not Path(path).is_file():
                raise UsageError(f"--{name.replace('_', '-')}: no such file {path!r}")
        if self.command in ("train-syll", "train-tagger") and self.output in (None, "-"):
            raise UsageError(f"{self.command} needs --output for the model file")
        if self.command in ("tag",) and self.model is None:
            raise UsageError("tag needs --model")
        if self.command in ("eval", "agree") and self.gold is None:
            raise UsageError(f"{self.command} needs --gold")

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(epochs=self.epochs, l2=self.l2, seed=self.seed)


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"--config: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"--config line {lineno}: expected key=value with a known key")
        values[key] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scansion", description="Scansion of verse: syllables, "
                     "meter tagging, verse measures, agreement and statistics.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="input file (default stdin)")
    parser.add_argument("--output", help="output file (default stdout)")
    parser.add_argument("--model", help="tagger model (tag, pipeline) or "
                        "hyphenation model (syllabify)")
    parser.add_argument("--syll-model", dest="syll_model",
                        help="hyphenation model for pipeline")
    parser.add_argument("--catalog", help="measure catalog file")
    parser.add_argument("--gold", help="gold or second-annotator corpus (eval, agree)")
    parser.add_argument("--lang", help="en or de (default en)")
    parser.add_argument("--seed", type=int, help="random seed (default 42)")
    parser.add_argument("--format", help="tabular or json (default tabular)")
    parser.add_argument("--epochs", type=int, help="training epochs (default 50)")
    parser.add_argument("--l2", type=float, help="L2 penalty (default 1e-4)")
    parser.add_argument("--layer", help=f"annotation layer (default met)")
    parser.add_argument("--aux-layer", dest="aux_layer",
                        help=f"second layer for joint tagging, one of {', '.join(TAGGABLE)}")
    parser.add_argument("--config", help="key=value file; flags take precedence")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_config(argv: Sequence[str]) -> tuple[CliConfig, bool]:
    args = build_parser().parse_args(list(argv))
    values: dict = _read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    try:
        for key, cast in (("seed", int), ("epochs", int), ("l2", float)):
            if key in values:
                values[key] = cast(values[key])
    except ValueError as exc:
        raise UsageError(str(exc))
    cfg = CliConfig(args.command, **values)
    cfg.validate()
    return cfg, args.verbose


# --- I/O -----------------------------------------------------------------------


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_corpus(path: str | None) -> list[Poem]:
    text = _read(path)
    if text.lstrip().startswith(("{", "[")):
        return read_poems_json(text)
    lines = parse_tabular(text)
    return [Poem(tuple(lines))] if lines else []


def _lines(poems: Sequence[Poem]):
    return [line for poem in poems for line in poem.lines]


def _write_corpus(cfg: CliConfig, poems: Sequence[Poem]) -> None:
    if cfg.format == "json":
        _write(cfg.output, write_poems_json(poems))
    else:
        _write(cfg.output, write_tabular(_lines(poems)))


def _relabel(poems: Sequence[Poem], lines) -> list[Poem]:
    out, k = [], 0
    for poem in poems:
        n = len(poem.lines)
        out.append(Poem(tuple(lines[k:k + n]), poem.stanza_breaks, poem.meta))
        k += n
    return out


def _catalog(cfg: CliConfig) -> MeasureCatalog:
    path = cfg.catalog or os.environ.get("SCANSION_CATALOG")
    if not path:
        return builtin_catalog()
    try:
        return load_catalog(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"catalog: {exc}")


def _syllabifier(cfg: CliConfig, path: str | None):
    if path:
        return HyphenationModel.loads(_read(path))
    return SonorityHierarchy.for_language(cfg.lang)


def _sample_lines():
    text = resources.files("scansion").joinpath("data/sample.tsv").read_text(encoding="utf-8")
    return parse_tabular(text)


# --- commands ------------------------------------------------------------------


def cmd_normalize(cfg: CliConfig) -> None:
    _write(cfg.output, normalize_text(_read(cfg.input)))


def cmd_tokenize(cfg: CliConfig) -> None:
    out = []
    for raw in normalize_text(_read(cfg.input)).splitlines():
        out.append(" ".join(strip_punctuation(tokenize_line(raw))) + "\n")
    _write(cfg.output, "".join(out))


def _poems_from_text(cfg: CliConfig, text: str, syllabifier) -> list[Poem]:
    stanzas = text_to_lines(text, syllabifier)
    if not stanzas:
        return []
    lines, breaks = [], []
    for stanza in stanzas:
        if lines:
            breaks.append(len(lines))
        lines.extend(stanza)
    return [Poem(tuple(lines), tuple(breaks), {"language": cfg.lang})]


def cmd_syllabify(cfg: CliConfig) -> None:
    poems = _poems_from_text(cfg, _read(cfg.input), _syllabifier(cfg, cfg.model))
    _write_corpus(cfg, poems)


def cmd_train_syll(cfg: CliConfig) -> None:
    gold = read_gold_list(_read(cfg.input))
    model = train_hyphenator(gold, TrainConfig(epochs=cfg.epochs, l2=cfg.l2, seed=cfg.seed,
                                               dev_fraction=0.0), lang=cfg.lang)
    report = evaluate_syllabifier([s for _, s in gold],
                                  model.syllabify_many([w for w, _ in gold]))
    log.info("training words: %d, word accuracy %.4f, syllable count accuracy %.4f",
             report.n_words, report.word_accuracy, report.syllable_count_accuracy)
    _write(cfg.output, model.dumps())


def cmd_train_tagger(cfg: CliConfig) -> None:
    lines = _lines(_read_corpus(cfg.input))
    tagger = train_tagger(lines, cfg.layer, cfg.aux_layer, cfg.train_config)
    _write(cfg.output, tagger.dumps())


def cmd_tag(cfg: CliConfig) -> None:
    tagger = Tagger.loads(_read(cfg.model))
    poems = _read_corpus(cfg.input)
    _write_corpus(cfg, _relabel(poems, tagger.tag_lines(_lines(poems))))


def cmd_measure(cfg: CliConfig) -> None:
    poems = _read_corpus(cfg.input)
    _write_corpus(cfg, _relabel(poems, assign_measures(_lines(poems), _catalog(cfg))))


def cmd_eval(cfg: CliConfig) -> None:
    report = eval_report(_read_corpus(cfg.gold), _read_corpus(cfg.input), cfg.layer)
    _write(cfg.output, report.to_json() if cfg.format == "json" else report.to_text())


def cmd_agree(cfg: CliConfig) -> None:
    report = kappa_granularities(_read_corpus(cfg.input), _read_corpus(cfg.gold), cfg.layer)
    _write(cfg.output, report.to_json() if cfg.format == "json" else report.to_text())


def cmd_stats(cfg: CliConfig) -> None:
    lines = _lines(_read_corpus(cfg.input))
    if lines and all(line.fmsr is None for line in lines):
        lines = assign_measures(lines, _catalog(cfg))
    ratios = accent_ratio(lines)
    freqs = measure_frequencies(lines)
    if cfg.format == "json":
        _write(cfg.output, json.dumps({"accent_ratio": ratios.to_dict(),
                                       "measures": dict(freqs)}, indent=2) + "\n")
        return
    width = max([len(name) for name, _ in freqs] + [7])
    text = "accent ratio (monosyllables)\n" + ratios.to_text() + "\nmeasures\n"
    text += "".join(f"{name.ljust(width)}  {count}\n" for name, count in freqs)
    _write(cfg.output, text)


def cmd_pipeline(cfg: CliConfig) -> None:
    text = _read(cfg.input)
    poems = _poems_from_text(cfg, text, _syllabifier(cfg, cfg.syll_model))
    if not poems:
        _write(cfg.output, "")
        return
    if cfg.model:
        tagger = Tagger.loads(_read(cfg.model))
    else:
        log.info("no --model given; training a stress tagger on the bundled sample")
        tagger = train_tagger(_sample_lines(), "met", config=cfg.train_config, use_pos=False)
    if tagger.layer != "met" and tagger.aux_layer != "met":
        raise DataError("pipeline needs a tagger that predicts the met layer")
    lines = assign_measures(tagger.tag_lines(_lines(poems)), _catalog(cfg))
    _write_corpus(cfg, _relabel(poems, lines))


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


def run(argv: Sequence[str]) -> int:
    try:
        cfg, verbose = parse_config(argv)
    except UsageError as exc:
        print(f"scansion: usage error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="scansion: %(message)s", stream=sys.stderr)
    try:
        HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"scansion: usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"scansion: data error: {exc}", file=sys.stderr)
        return 2
    except UnicodeDecodeError as exc:
        print(f"scansion: data error: input is not UTF-8 ({exc.reason})", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
