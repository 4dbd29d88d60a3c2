"""Stress-pattern language.

Grammar (whitespace is not allowed)::

    pattern  := sequence EOF
    sequence := term+
    term     := atom quant?
    atom     := '+' | '-' | '(' sequence ('|' sequence)* ')'
    quant    := '?' | '{' INT '}' | '{' INT ',' INT '}'

``+`` and ``-`` are always literals, so ``(++)+`` is the group ``++``
followed by one more stressed syllable.  The ``|`` alternation is what
modifiers such as *relaxed* compile to; hand-written catalog patterns
rarely need it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from ..errors import DataError

MAX_DEPTH = 4
SYMBOLS = "+-"


class ParseError(DataError):
    def __init__(self, offset: int, expected: set[str], dsl: str):
        self.offset = offset
        self.expected = frozenset(expected)
        shown = ", ".join(repr(e) for e in sorted(expected))
        super().__init__(f"parse error at offset {offset} in {dsl!r}: expected one of {shown}")


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class Group:
    alternatives: tuple[tuple["Term", ...], ...]


@dataclass(frozen=True)
class Term:
    atom: Union[Literal, Group]
    lo: int = 1
    hi: int = 1

    @property
    def quantifier(self) -> str:
        if (self.lo, self.hi) == (1, 1):
            return "one"
        if (self.lo, self.hi) == (0, 1):
            return "optional"
        return "exactly" if self.lo == self.hi else "range"


@dataclass(frozen=True)
class PatternAst:
    terms: tuple[Term, ...]
    modifier: str | None = None

    def __str__(self) -> str:
        return to_dsl(self)


def _quant_str(term: Term) -> str:
    kind = term.quantifier
    if kind == "one":
        return ""
    if kind == "optional":
        return "?"
    if kind == "exactly":
        return "{%d}" % term.lo
    return "{%d,%d}" % (term.lo, term.hi)


def _seq_str(terms: tuple[Term, ...]) -> str:
    out = []
    for term in terms:
        if isinstance(term.atom, Literal):
            out.append(term.atom.symbol)
        else:
            out.append("(" + "|".join(_seq_str(alt) for alt in term.atom.alternatives) + ")")
        out.append(_quant_str(term))
    return "".join(out)


def to_dsl(ast: PatternAst) -> str:
    """Canonical pattern text; ``compile_pattern(to_dsl(a)) == a``."""
    return _seq_str(ast.terms)


def _normalize_term(atom, lo: int, hi: int) -> list[Term]:
    if isinstance(atom, Group) and len(atom.alternatives) == 1:
        inner = atom.alternatives[0]
        if (lo, hi) == (1, 1):
            return list(inner)
        if len(inner) == 1 and inner[0].quantifier == "one":
            return [Term(inner[0].atom, lo, hi)]
    return [Term(atom, lo, hi)]


class _Parser:
    def __init__(self, dsl: str):
        self.s = dsl
        self.i = 0

    def fail(self, expected: set[str]):
        raise ParseError(self.i, expected, self.s)

    def peek(self) -> str | None:
        return self.s[self.i] if self.i < len(self.s) else None

    def parse(self) -> PatternAst:
        terms = self.sequence(0)
        if self.i != len(self.s):
            self.fail({"+", "-", "(", "end of pattern"})
        return PatternAst(tuple(terms))

    def sequence(self, depth: int) -> list[Term]:
        terms: list[Term] = []
        while self.peek() in ("+", "-", "("):
            terms.extend(self.term(depth))
        if not terms:
            self.fail({"+", "-", "("})
        return terms

    def term(self, depth: int) -> list[Term]:
        ch = self.peek()
        if ch in ("+", "-"):
            self.i += 1
            atom = Literal(ch)
        else:
            if depth + 1 > MAX_DEPTH:
                self.fail({"'+'", "'-'"})  # groups nest at most MAX_DEPTH deep
            self.i += 1
            alternatives = [tuple(self.sequence(depth + 1))]
            while self.peek() == "|":
                self.i += 1
                alternatives.append(tuple(self.sequence(depth + 1)))
            if self.peek() != ")":
                self.fail({"+", "-", "(", ")", "|"})
            self.i += 1
            atom = Group(tuple(alternatives))
        lo, hi = self.quantifier()
        return _normalize_term(atom, lo, hi)

    def integer(self) -> int:
        start = self.i
        while self.peek() is not None and self.peek().isdigit():
            self.i += 1
        if start == self.i:
            self.fail({"digit"})
        return int(self.s[start:self.i])

    def quantifier(self) -> tuple[int, int]:
        ch = self.peek()
        if ch == "?":
            self.i += 1
            return 0, 1
        if ch != "{":
            return 1, 1
        self.i += 1
        start = self.i
        lo = self.integer()
        hi = lo
        if self.peek() == ",":
            self.i += 1
            hi = self.integer()
        if self.peek() != "}":
            self.fail({"}", ","} if hi == lo else {"}"})
        self.i += 1
        if lo < 1 or hi < lo:
            raise ParseError(start, {"n >= 1 and m >= n"}, self.s)
        return lo, hi


def compile_pattern(dsl: str) -> PatternAst:
    """Parse pattern text into a normalized :class:`PatternAst`."""
    return _Parser(dsl).parse()


# --- reference interpreter -----------------------------------------------------
# Deliberately naive: enumerates every way to consume the input.  Used as the
# oracle against which the automaton compiler is tested.


def _seq_ends(terms: tuple[Term, ...], s: str, start: int) -> frozenset[int]:
    positions = {start}
    for term in terms:
        nxt: set[int] = set()
        for p in positions:
            nxt |= _term_ends(term, s, p)
        positions = nxt
        if not positions:
            break
    return frozenset(positions)


def _atom_ends(atom, s: str, start: int) -> frozenset[int]:
    if isinstance(atom, Literal):
        if start < len(s) and s[start] == atom.symbol:
            return frozenset({start + 1})
        return frozenset()
    ends: set[int] = set()
    for alt in atom.alternatives:
        ends |= _seq_ends(alt, s, start)
    return frozenset(ends)


def _term_ends(term: Term, s: str, start: int) -> frozenset[int]:
    ends: set[int] = set()
    frontier = {start}
    for count in range(1, term.hi + 1):
        nxt: set[int] = set()
        for p in frontier:
            nxt |= _atom_ends(term.atom, s, p)
        frontier = nxt
        if count >= term.lo:
            ends |= frontier
    if term.lo == 0:
        ends.add(start)
    return frozenset(ends)


def interpret(ast: PatternAst, s: str) -> bool:
    """Full-string match by exhaustive search over the AST."""
    return len(s) in _seq_ends(ast.terms, s, 0)


def _gen_seq(terms: tuple[Term, ...], budget: int) -> set[str]:
    results = {""}
    for term in terms:
        results = {a + b for a in results for b in _gen_term(term, budget)
                   if len(a + b) <= budget}
    return results


def _gen_term(term: Term, budget: int) -> set[str]:
    if isinstance(term.atom, Literal):
        one = {term.atom.symbol}
    else:
        one = set()
        for alt in term.atom.alternatives:
            one |= _gen_seq(alt, budget)
    res = {""} if term.lo == 0 else set()
    current = {""}
    for count in range(1, term.hi + 1):
        current = {a + b for a in current for b in one if len(a + b) <= budget}
        if count >= term.lo:
            res |= current
    return res


@lru_cache(maxsize=None)
def expand(ast: PatternAst, limit: int = 64) -> frozenset[str]:
    """All strings generated by ``ast`` of length at most ``limit``."""
    return frozenset(_gen_seq(ast.terms, limit))
