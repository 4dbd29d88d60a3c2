"""Verse-measure catalog and line classification.

A measure label names the dominant foot and the number of stressed
syllables, e.g. ``iambic.pentameter``.  Lines that miss every strict
pattern are retried with one modifier at a time: an inverted first foot
(``.invert``), a limping ``--+`` close (``.chol``) and a single inserted
unstressed syllable (``.relaxed``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import DataError, MissingLayer
from .automaton import Matcher, compile_matcher
from .dsl import Group, Literal, PatternAst, Term, compile_pattern, to_dsl

MODIFIERS = ("invert", "relaxed", "chol")
# chol is consulted before relaxed: a lengthened final foot is also a
# one-syllable insertion, and the limping close is the more specific reading.
CLASSIFY_ORDER = ("invert", "chol", "relaxed")
OTHER = "other"

FEET = {
    "iambic": "-+",
    "trochaic": "+-",
    "anapaest": "--+",
    "amphibrach": "-+-",
    "daktylic": "+--",
}
LENGTHS = (
    ("single", 1), ("dimeter", 2), ("trimeter", 3), ("tetrameter", 4),
    ("pentameter", 5), ("hexameter", 6), ("septameter", 7),
)
FAMILY_MODIFIERS = {
    "iambic": frozenset({"invert", "relaxed", "chol"}),
    "trochaic": frozenset({"invert", "relaxed"}),
    "anapaest": frozenset({"relaxed"}),
    "amphibrach": frozenset({"relaxed"}),
    "daktylic": frozenset({"relaxed"}),
}
HISTORICAL = (
    ("asklepiade", "+-+--++--+-+"),
    ("alexandrine", "(-+){6}-?"),
    ("hexameter", "+--?+--?+--?+--?+--+-"),
    ("spondeus", "(++)+"),
)
# Named in annotated corpora but without a published stress pattern.
STUB_FORMS = ("glykoneus", "pherekrateus", "prosodiakos", "zehnsilber")
HISTORICAL_NAMES = frozenset(
    [name for name, _ in HISTORICAL] + list(STUB_FORMS))


class UnsupportedModifier(DataError):
    pass


class EmptyMeter(DataError):
    pass


class BadSymbol(DataError):
    pass


class CatalogError(DataError):
    pass


# (repeated foot, final foot with its optional cadence, optional upbeat)
_FAMILY_SHAPE = {
    "-+": ("-+", "-+-?", ""),
    "+-": ("+-", "+-?", ""),
    "-+-": ("-+-", "-+-?", ""),
    "+--": ("+--", "+-?-?", ""),
    "--+": ("--+", "-+", "-?"),
}


def _repeat(foot: str, k: int) -> str:
    if k == 0:
        return ""
    return foot if k == 1 else "(%s){%d}" % (foot, k)


def family_dsl(foot: str, n: int) -> str:
    """Pattern text for a line of ``n`` feet of one family."""
    body, final, upbeat = _FAMILY_SHAPE[foot]
    if foot == "--+":
        return upbeat + final + _repeat(body, n - 1)
    if final == body + "-?":
        return _repeat(body, n) + "-?"
    return _repeat(body, n - 1) + final


# --- modifiers -----------------------------------------------------------------


def _flatten(ast: PatternAst) -> list[tuple[str, bool]]:
    """Unroll to (symbol, optional) pairs; only fixed-count repetition allowed."""
    flat: list[tuple[str, bool]] = []

    def walk(terms: tuple[Term, ...]):
        for term in terms:
            if isinstance(term.atom, Literal):
                if term.quantifier not in ("one", "optional"):
                    raise UnsupportedModifier(f"repeated literal in {to_dsl(ast)!r}")
                flat.append((term.atom.symbol, term.lo == 0))
            elif len(term.atom.alternatives) == 1 and term.lo == term.hi:
                for _ in range(term.lo):
                    walk(term.atom.alternatives[0])
            else:
                raise UnsupportedModifier(
                    f"{to_dsl(ast)!r} is not a foot-repetition pattern")

    walk(ast.terms)
    return flat


def _from_flat(flat: Sequence[tuple[str, bool]]) -> tuple[Term, ...]:
    return tuple(Term(Literal(sym), 0 if opt else 1, 1) for sym, opt in flat)


def apply_modifier(pattern: PatternAst, modifier: str) -> PatternAst:
    """Derive the modified variant of a strict family pattern.

    >>> to_dsl(apply_modifier(compile_pattern("(-+){4}-?"), "invert"))
    '+--+-+-+-?'
    """
    if modifier not in MODIFIERS:
        raise UnsupportedModifier(f"unknown modifier {modifier!r}")
    if pattern.modifier is not None:
        raise UnsupportedModifier(
            f"pattern already carries modifier {pattern.modifier!r}")
    flat = _flatten(pattern)
    required = [k for k, (_, opt) in enumerate(flat) if not opt]
    if len(required) < 2:
        raise UnsupportedModifier("pattern too short to modify")

    if modifier == "invert":
        (a, a_opt), (b, b_opt) = flat[0], flat[1]
        if a_opt or b_opt or a == b:
            raise UnsupportedModifier(f"cannot invert the first foot of {to_dsl(pattern)!r}")
        return PatternAst(_from_flat([(b, False), (a, False)] + flat[2:]), "invert")

    if modifier == "chol":
        if flat[0] != ("-", False) or flat[1] != ("+", False):
            raise UnsupportedModifier(f"choliambic close needs a rising line: {to_dsl(pattern)!r}")
        last = max(k for k in required if flat[k][0] == "+")
        if last < 1 or flat[last - 1] != ("-", False):
            raise UnsupportedModifier(f"no final -+ foot in {to_dsl(pattern)!r}")
        return PatternAst(_from_flat(flat[:last] + [("-", False)] + flat[last:]), "chol")

    # relaxed: one extra unstressed syllable strictly inside the line
    variants: list[tuple[Term, ...]] = []
    seen = set()
    for p in range(1, required[-1] + 1):
        candidate = flat[:p] + [("-", False)] + flat[p:]
        key = tuple(candidate)
        if key not in seen:
            seen.add(key)
            variants.append(_from_flat(candidate))
    return PatternAst((Term(Group(tuple(variants))),), "relaxed")


# --- catalog -------------------------------------------------------------------


@dataclass(frozen=True)
class MeasurePattern:
    name: str
    ast: PatternAst
    priority: int
    allow_modifiers: frozenset[str] = frozenset()
    matcher: Matcher = field(init=False, repr=False, compare=False)
    modified: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.name:
            raise CatalogError("measure name must be non-empty")
        bad = set(self.allow_modifiers) - set(MODIFIERS)
        if bad:
            raise CatalogError(f"{self.name}: unknown modifiers {sorted(bad)}")
        object.__setattr__(self, "allow_modifiers", frozenset(self.allow_modifiers))
        object.__setattr__(self, "matcher", compile_matcher(self.ast))
        modified = {m: compile_matcher(apply_modifier(self.ast, m))
                    for m in self.allow_modifiers}
        object.__setattr__(self, "modified", modified)

    @property
    def dsl(self) -> str:
        return to_dsl(self.ast)


@dataclass(frozen=True)
class MeasureCatalog:
    patterns: tuple[MeasurePattern, ...]
    fallback: str = OTHER

    def __post_init__(self):
        ordered = tuple(sorted(self.patterns, key=lambda p: p.priority))
        object.__setattr__(self, "patterns", ordered)
        names = [p.name for p in ordered]
        if len(set(names)) != len(names):
            dup = sorted(n for n, c in Counter(names).items() if c > 1)
            raise CatalogError(f"duplicate measure names: {dup}")
        prios = [p.priority for p in ordered]
        if len(set(prios)) != len(prios):
            raise CatalogError("measure priorities must be unique")

    def __len__(self) -> int:
        return len(self.patterns)

    def __getitem__(self, name: str) -> MeasurePattern:
        for p in self.patterns:
            if p.name == name:
                return p
        raise KeyError(name)

    def names(self) -> list[str]:
        return [p.name for p in self.patterns]


def builtin_catalog() -> MeasureCatalog:
    patterns = []
    for k, (name, dsl) in enumerate(HISTORICAL):
        patterns.append(MeasurePattern(name, compile_pattern(dsl), 10 * (k + 1)))
    for f, (family, foot) in enumerate(FEET.items()):
        for n_feet in range(len(LENGTHS), 0, -1):
            label, n = LENGTHS[n_feet - 1]
            priority = 100 * (f + 1) + (len(LENGTHS) - n)
            patterns.append(MeasurePattern(
                f"{family}.{label}", compile_pattern(family_dsl(foot, n)),
                priority, FAMILY_MODIFIERS[family] if n > 1 else frozenset()))
    return MeasureCatalog(tuple(patterns))


def smsr_of(fmsr: str) -> str:
    """Short measure: the label without length or modifier."""
    head = fmsr.split(".", 1)[0]
    return head


def _check_meter(met: str) -> None:
    if not met:
        raise EmptyMeter("empty stress string")
    bad = set(met) - {"+", "-"}
    if bad:
        raise BadSymbol(f"stress string {met!r} contains {sorted(bad)}")


def classify_line(met: str, catalog: MeasureCatalog | None = None) -> tuple[str, str]:
    """Return ``(fmsr, smsr)`` for a line's stress string."""
    _check_meter(met)
    catalog = catalog or _default_catalog()
    for pattern in catalog.patterns:
        if pattern.matcher.fullmatch(met):
            return pattern.name, smsr_of(pattern.name)
    for modifier in CLASSIFY_ORDER:
        for pattern in catalog.patterns:
            matcher = pattern.modified.get(modifier)
            if matcher is not None and matcher.fullmatch(met):
                name = f"{pattern.name}.{modifier}"
                return name, smsr_of(name)
    return catalog.fallback, catalog.fallback


_DEFAULT: list[MeasureCatalog] = []


def _default_catalog() -> MeasureCatalog:
    if not _DEFAULT:
        _DEFAULT.append(builtin_catalog())
    return _DEFAULT[0]


def measure_frequencies(lines: Iterable) -> list[tuple[str, int]]:
    """Count short measures, most frequent first (ties alphabetical)."""
    counts: Counter[str] = Counter()
    for k, line in enumerate(lines):
        if line.fmsr is None:
            raise MissingLayer(f"line {k} has no fmsr")
        counts[line.smsr if line.smsr is not None else smsr_of(line.fmsr)] += 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


# --- catalog files -------------------------------------------------------------


def load_catalog(text: str) -> MeasureCatalog:
    """Read ``name<TAB>priority<TAB>dsl[<TAB>modifiers]`` entries."""
    patterns = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = raw.rstrip("\n").split("\t")
        if len(fields) not in (3, 4):
            raise CatalogError(f"line {lineno}: expected 3 or 4 tab-separated fields")
        name, prio, dsl = (f.strip() for f in fields[:3])
        try:
            priority = int(prio)
        except ValueError:
            raise CatalogError(f"line {lineno}: priority {prio!r} is not an integer")
        mods = frozenset(m for m in fields[3].strip().split(",") if m) if len(fields) == 4 else frozenset()
        patterns.append(MeasurePattern(name, compile_pattern(dsl), priority, mods))
    return MeasureCatalog(tuple(patterns))


def dump_catalog(catalog: MeasureCatalog, stubs: Iterable[str] = ()) -> str:
    lines = ["# name\tpriority\tpattern\tmodifiers"]
    for p in catalog.patterns:
        entry = f"{p.name}\t{p.priority}\t{p.dsl}"
        if p.allow_modifiers:
            entry += "\t" + ",".join(m for m in MODIFIERS if m in p.allow_modifiers)
        lines.append(entry)
    for name in stubs:
        lines.append(f"# {name}\t<priority>\t<pattern>  (no pattern shipped; supply one)")
    return "\n".join(lines) + "\n"
