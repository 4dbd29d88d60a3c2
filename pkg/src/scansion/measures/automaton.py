"""Compile stress patterns to deterministic automata.

Thompson construction builds an epsilon-NFA from the AST; subset
construction then yields a DFA over the two-letter alphabet ``{+, -}``.
Matching is a table walk, linear in the input length.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsl import SYMBOLS, Group, Literal, PatternAst, Term, to_dsl


class _Nfa:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.moves: list[dict[str, int]] = []

    def state(self) -> int:
        self.eps.append([])
        self.moves.append({})
        return len(self.eps) - 1

    # each builder returns (entry, exit) for a fresh fragment

    def literal(self, symbol: str) -> tuple[int, int]:
        a, b = self.state(), self.state()
        self.moves[a][symbol] = b
        return a, b

    def sequence(self, terms: tuple[Term, ...]) -> tuple[int, int]:
        entry = exit_ = self.state()
        for term in terms:
            a, b = self.term(term)
            self.eps[exit_].append(a)
            exit_ = b
        return entry, exit_

    def atom(self, atom) -> tuple[int, int]:
        if isinstance(atom, Literal):
            return self.literal(atom.symbol)
        assert isinstance(atom, Group)
        entry, exit_ = self.state(), self.state()
        for alt in atom.alternatives:
            a, b = self.sequence(alt)
            self.eps[entry].append(a)
            self.eps[b].append(exit_)
        return entry, exit_

    def term(self, term: Term) -> tuple[int, int]:
        entry = exit_ = self.state()
        for count in range(term.hi):
            a, b = self.atom(term.atom)
            self.eps[exit_].append(a)
            if count >= term.lo:
                # this copy is optional
                self.eps[exit_].append(b)
            exit_ = b
        return entry, exit_

    def closure(self, states) -> frozenset[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            s = stack.pop()
            for t in self.eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)


@dataclass(frozen=True)
class Matcher:
    """A compiled DFA. State 0 is the start state; -1 is the dead state."""

    transitions: tuple[tuple[int, ...], ...]
    accepting: frozenset[int]
    source: str = ""

    def fullmatch(self, s: str) -> bool:
        state = 0
        for ch in s:
            k = SYMBOLS.find(ch)
            if k < 0:
                return False
            state = self.transitions[state][k]
            if state < 0:
                return False
        return state in self.accepting

    @property
    def n_states(self) -> int:
        return len(self.transitions)


def compile_matcher(ast: PatternAst) -> Matcher:
    nfa = _Nfa()
    start, final = nfa.sequence(ast.terms)
    first = nfa.closure([start])
    index = {first: 0}
    queue = [first]
    rows: list[list[int]] = []
    accepting = set()
    while len(rows) < len(queue):
        current = queue[len(rows)]
        if final in current:
            accepting.add(len(rows))
        row = []
        for symbol in SYMBOLS:
            targets = [nfa.moves[s][symbol] for s in current if symbol in nfa.moves[s]]
            if not targets:
                row.append(-1)
                continue
            nxt = nfa.closure(targets)
            if nxt not in index:
                index[nxt] = len(queue)
                queue.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    return Matcher(tuple(tuple(r) for r in rows), frozenset(accepting), to_dsl(ast))
