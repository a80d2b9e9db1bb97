"""Regular expressions over constraints.

Grammar (postfix binds tighter than ``.``, which binds tighter than ``|``)::

    alt     := concat ('|' concat)*
    concat  := postfix ('.' postfix)*
    postfix := primary ('*' | '+' | '?')*
    primary := constraint | '(' alt ')' | '()' | 'ε'

Expressions compile to a DFA whose alphabet is the set of distinct
constraints, compared structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence, Union

from .catalog import Eco, EventTuple, NormalizedToI
from .constraints import (DEFAULT_REGISTRY, Constraint, FunctionRegistry,
                          _Cursor, parse_constraint_at,
                          tuple_temporally_satisfies)
from .errors import UsageError
from .sequences import (EcoList, Match, MatchContext, ObjectVerdict,
                        SequentialExpression, SupportResult)
from .timecore import contains

MatchKind = Literal["temporal", "total"]


# -- syntax tree ----------------------------------------------------------------

@dataclass(frozen=True)
class Epsilon:
    def render(self) -> str:
        return "()"


@dataclass(frozen=True)
class Symbol:
    constraint: Constraint

    def render(self) -> str:
        return self.constraint.render()


@dataclass(frozen=True)
class Alternation:
    left: object
    right: object

    def render(self) -> str:
        return f"({self.left.render()}|{self.right.render()})"


@dataclass(frozen=True)
class Concatenation:
    left: object
    right: object

    def render(self) -> str:
        return f"({self.left.render()}.{self.right.render()})"


@dataclass(frozen=True)
class Option:
    child: object

    def render(self) -> str:
        return f"({self.child.render()})?"


@dataclass(frozen=True)
class Star:
    child: object

    def render(self) -> str:
        return f"({self.child.render()})*"


@dataclass(frozen=True)
class Plus:
    child: object

    def render(self) -> str:
        return f"({self.child.render()})+"


ConstraintRegex = Union[Epsilon, Symbol, Alternation, Concatenation, Option,
                        Star, Plus]

_POSTFIX = {"*": Star, "+": Plus, "?": Option}


class _Parser:
    def __init__(self, text: str, registry: FunctionRegistry):
        self.cur = _Cursor(text)
        self.registry = registry

    def parse(self):
        node = self.alternation()
        if self.cur.peek():
            raise self.cur.error(f"unexpected {self.cur.peek()!r}")
        return node

    def alternation(self):
        node = self.concatenation()
        while self.cur.peek() == "|":
            self.cur.pos += 1
            node = Alternation(node, self.concatenation())
        return node

    def concatenation(self):
        node = self.postfix()
        while self.cur.peek() == ".":
            self.cur.pos += 1
            node = Concatenation(node, self.postfix())
        return node

    def postfix(self):
        node = self.primary()
        while self.cur.peek() in _POSTFIX:
            node = _POSTFIX[self.cur.peek()](node)
            self.cur.pos += 1
        return node

    def primary(self):
        ch = self.cur.peek()
        if ch == "[":
            c, self.cur.pos = parse_constraint_at(self.cur.text, self.cur.pos,
                                                  self.registry)
            return Symbol(c)
        if ch == "ε":
            self.cur.pos += 1
            return Epsilon()
        if ch == "(":
            self.cur.pos += 1
            if self.cur.peek() == ")":
                self.cur.pos += 1
                return Epsilon()
            node = self.alternation()
            self.cur.expect(")")
            return node
        found = repr(ch) if ch else "end of input"
        raise self.cur.error(f"expected a constraint, '(' or 'ε', found {found}")


def parse_re(text: str, registry: FunctionRegistry = DEFAULT_REGISTRY):
    return _Parser(text, registry).parse()


def as_sequential(node) -> SequentialExpression | None:
    """The SE a pure concatenation of constraints denotes, else None."""
    out = []

    def walk(n) -> bool:
        if isinstance(n, Symbol):
            out.append(n.constraint)
            return True
        if isinstance(n, Concatenation):
            return walk(n.left) and walk(n.right)
        return False

    return SequentialExpression(tuple(out)) if walk(node) else None


def symbols(node) -> list[Constraint]:
    """Distinct constraints in first-appearance order."""
    seen: dict[Constraint, None] = {}

    def walk(n):
        if isinstance(n, Symbol):
            seen.setdefault(n.constraint)
        elif isinstance(n, (Alternation, Concatenation)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Option, Star, Plus)):
            walk(n.child)

    walk(node)
    return list(seen)


# -- automaton ------------------------------------------------------------------

class _NFA:
    """Thompson construction: one start and one accept state per fragment."""

    def __init__(self, alphabet: dict[Constraint, int]):
        self.alphabet = alphabet
        self.eps: list[list[int]] = []
        self.moves: list[list[tuple[int, int]]] = []

    def state(self) -> int:
        self.eps.append([])
        self.moves.append([])
        return len(self.eps) - 1

    def build(self, node) -> tuple[int, int]:
        s, f = self.state(), self.state()
        if isinstance(node, Epsilon):
            self.eps[s].append(f)
        elif isinstance(node, Symbol):
            self.moves[s].append((self.alphabet[node.constraint], f))
        elif isinstance(node, Alternation):
            for part in (node.left, node.right):
                ps, pf = self.build(part)
                self.eps[s].append(ps)
                self.eps[pf].append(f)
        elif isinstance(node, Concatenation):
            ls, lf = self.build(node.left)
            rs, rf = self.build(node.right)
            self.eps[s].append(ls)
            self.eps[lf].append(rs)
            self.eps[rf].append(f)
        elif isinstance(node, (Option, Star, Plus)):
            cs, cf = self.build(node.child)
            self.eps[s].append(cs)
            self.eps[cf].append(f)
            if not isinstance(node, Plus):
                self.eps[s].append(f)
            if not isinstance(node, Option):
                self.eps[cf].append(cs)
        else:
            raise TypeError(f"not a regular-expression node: {node!r}")
        return s, f

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        stack = list(states)
        seen = set(stack)
        while stack:
            for nxt in self.eps[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(seen)


@dataclass(frozen=True)
class Automaton:
    """Deterministic automaton over constraint symbols.

    Missing transitions go to an implicit dead state.  ``live`` holds the
    states from which an accepting state is reachable.
    """

    alphabet: tuple[Constraint, ...]
    start: int
    accepting: frozenset[int]
    transitions: dict[tuple[int, int], int]
    n_states: int
    live: frozenset[int]

    def step(self, state: int | None, c: Constraint) -> int | None:
        if state is None:
            return None
        try:
            idx = self.alphabet.index(c)
        except ValueError:
            return None
        return self.transitions.get((state, idx))

    def accepts(self, word: Iterable[Constraint]) -> bool:
        state = self.start
        for c in word:
            state = self.step(state, c)
            if state is None:
                return False
        return state in self.accepting

    def successors(self, state: int) -> list[tuple[Constraint, int]]:
        return [(c, nxt) for i, c in enumerate(self.alphabet)
                if (nxt := self.transitions.get((state, i))) is not None
                and nxt in self.live]


def compile_re(node) -> Automaton:
    """Thompson NFA followed by subset construction."""
    alphabet = {c: i for i, c in enumerate(symbols(node))}
    nfa = _NFA(alphabet)
    nfa_start, nfa_accept = nfa.build(node)

    start = nfa.closure([nfa_start])
    ids = {start: 0}
    queue = [start]
    transitions: dict[tuple[int, int], int] = {}
    while queue:
        current = queue.pop()
        for sym in range(len(alphabet)):
            moved = [t for s in current for a, t in nfa.moves[s] if a == sym]
            if not moved:
                continue
            target = nfa.closure(moved)
            if target not in ids:
                ids[target] = len(ids)
                queue.append(target)
            transitions[(ids[current], sym)] = ids[target]

    accepting = frozenset(i for subset, i in ids.items() if nfa_accept in subset)
    live = set(accepting)
    changed = True
    while changed:
        changed = False
        for (src, _), dst in transitions.items():
            if dst in live and src not in live:
                live.add(src)
                changed = True
    return Automaton(tuple(alphabet), 0, accepting, transitions, len(ids),
                     frozenset(live))


def enumerate_strings(a: Automaton, max_len: int) -> set[SequentialExpression]:
    """All accepted non-empty strings of length at most ``max_len``."""
    if max_len < 1:
        raise UsageError("max_len must be at least 1")
    out = set()
    frontier = [(a.start, ())] if a.start in a.live else []
    for _ in range(max_len):
        frontier = [(nxt, word + (c,)) for state, word in frontier
                    for c, nxt in a.successors(state)]
        out.update(SequentialExpression(word) for state, word in frontier
                   if state in a.accepting)
    return out


# -- matching ---------------------------------------------------------------------

def _as_automaton(re, registry: FunctionRegistry) -> Automaton:
    if isinstance(re, Automaton):
        return re
    if isinstance(re, str):
        re = parse_re(re, registry)
    return compile_re(re)


def find_re_match(events: Sequence[EventTuple], a: Automaton, kind: MatchKind,
                  ctx: MatchContext) -> Match | None:
    """Search (automaton state, next event index) for an accepted string the
    object matches.

    Each step assigns a strictly later tuple to an ECO whose interval
    contains it.  Because tuple times increase, the chosen ECOs are
    automatically t-ordered (start_i <= t_i < t_j <= end_j), so no separate
    list check is needed.
    """
    if kind not in ("temporal", "total"):
        raise UsageError(f"unknown match kind {kind!r}")
    events = sorted(events, key=lambda ev: ev.t)
    n = len(events)
    served: dict[tuple[Constraint, int], Eco | None] = {}

    def serve(c: Constraint, j: int) -> Eco | None:
        key = (c, j)
        if key not in served:
            ev = events[j]
            hit = None
            for eco in ctx.satisfiers(c):
                if not contains(eco.interval, ev.t, ctx.now):
                    continue
                if kind == "total" and not (
                        eco.id == ev.id
                        and tuple_temporally_satisfies(ev, c, ctx.registry)):
                    continue
                hit = eco
                break
            served[key] = hit
        return served[key]

    failed: set[tuple[int, int]] = set()
    path: list[tuple[EventTuple, Eco, Constraint]] = []

    def rec(state: int, start: int) -> bool:
        if path and state in a.accepting:
            return True
        key = (state, start)
        if key in failed:
            return False
        for j in range(start, n):
            for c, nxt in a.successors(state):
                eco = serve(c, j)
                if eco is not None:
                    path.append((events[j], eco, c))
                    if rec(nxt, j + 1):
                        return True
                    path.pop()
        # memo only non-empty paths: at depth 0 the accept test is skipped
        if path:
            failed.add(key)
        return False

    if a.start in a.live and rec(a.start, 0):
        evs, ecos, cs = zip(*path)
        return Match(tuple(evs), EcoList.of(ecos), tuple(cs))
    return None


def re_matches(events: Sequence[EventTuple], a: Automaton, kind: MatchKind,
               ctx: MatchContext) -> bool:
    return find_re_match(events, a, kind, ctx) is not None


def re_temporal_support(re, ntoi: NormalizedToI, ctx: MatchContext) -> SupportResult:
    """``re`` may be text, a syntax tree or a compiled :class:`Automaton`."""
    a = _as_automaton(re, ctx.registry)
    ctx.warm(a.alphabet)
    verdicts = []
    for oid in ntoi.objects:
        events = ntoi.events(oid)
        tw = find_re_match(events, a, "temporal", ctx)
        ow = find_re_match(events, a, "total", ctx) if tw else None
        verdicts.append(ObjectVerdict(oid, tw is not None, ow is not None, tw, ow))
    return SupportResult.from_verdicts(verdicts)
