"""Sequential expressions: t-ordered ECO lists, levelwise list generation,
temporal/total matching of objects and temporal support."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .catalog import Eco, EventTuple, NormalizedToI
from .constraints import (DEFAULT_REGISTRY, Constraint, FunctionRegistry,
                          _Cursor, eco_satisfies, parse_constraint_at,
                          tuple_temporally_satisfies)
from .errors import UnknownAttributeError, UsageError
from .timecore import MINUTE, Granularity, TimePoint, contains, follows


@dataclass(frozen=True)
class SequentialExpression:
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.constraints:
            raise UsageError("a sequential expression has at least one constraint")

    @classmethod
    def parse(cls, text: str,
              registry: FunctionRegistry = DEFAULT_REGISTRY) -> SequentialExpression:
        """Parse ``[c1].[c2]...[ck]``."""
        constraints = []
        pos = 0
        while True:
            c, pos = parse_constraint_at(text, pos, registry)
            constraints.append(c)
            cur = _Cursor(text, pos)
            nxt = cur.peek()
            if not nxt:
                return cls(tuple(constraints))
            if nxt != ".":
                raise cur.error("expected '.' between constraints")
            pos = cur.pos + 1

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]

    def render(self) -> str:
        return ".".join(c.render() for c in self.constraints)

    __str__ = render


@dataclass(frozen=True)
class EcoList:
    """An ordered ECO list carrying the largest start time of its members,
    which makes the append-time t-order check a single comparison."""

    ecos: tuple[Eco, ...]
    max_start: TimePoint | None = None

    @classmethod
    def of(cls, ecos: Iterable[Eco]) -> EcoList:
        ecos = tuple(ecos)
        return cls(ecos, max((e.interval.start for e in ecos), default=None))

    def can_append(self, e: Eco, now: TimePoint) -> bool:
        return self.max_start is None or self.max_start < e.interval.resolve_end(now)

    def append(self, e: Eco) -> EcoList:
        start = e.interval.start
        return EcoList(self.ecos + (e,),
                       start if self.max_start is None else max(self.max_start, start))

    def __len__(self) -> int:
        return len(self.ecos)

    def __iter__(self):
        return iter(self.ecos)

    def __getitem__(self, i):
        return self.ecos[i]

    def __repr__(self) -> str:
        return "(" + ", ".join(map(repr, self.ecos)) + ")"


@dataclass(frozen=True)
class SatisfyingListSet:
    se: SequentialExpression
    lists: tuple[EcoList, ...]

    def __len__(self) -> int:
        return len(self.lists)

    def __iter__(self):
        return iter(self.lists)

    def as_tuples(self) -> set[tuple[Eco, ...]]:
        return {lst.ecos for lst in self.lists}


@dataclass(frozen=True)
class Match:
    """Witness of a match: the chosen tuples and the list they fall into."""

    events: tuple[EventTuple, ...]
    ecos: EcoList
    constraints: tuple[Constraint, ...] = ()


@dataclass(frozen=True)
class ObjectVerdict:
    oid: str
    temporal: bool
    total: bool
    temporal_witness: Match | None = None
    total_witness: Match | None = None


@dataclass(frozen=True)
class SupportResult:
    total_matchers: int
    temporal_matchers: int
    verdicts: tuple[ObjectVerdict, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not 0 <= self.total_matchers <= self.temporal_matchers:
            raise ValueError("total matchers must not exceed temporal matchers")

    @property
    def support(self) -> Fraction:
        if self.temporal_matchers == 0:
            return Fraction(0)
        return Fraction(self.total_matchers, self.temporal_matchers)

    @classmethod
    def from_verdicts(cls, verdicts: Iterable[ObjectVerdict]) -> SupportResult:
        verdicts = tuple(verdicts)
        return cls(sum(v.total for v in verdicts),
                   sum(v.temporal for v in verdicts), verdicts)


def is_t_ordered(ecos: Sequence[Eco], now: TimePoint) -> bool:
    """No earlier ECO's interval follows a later one's (checked pairwise)."""
    return not any(follows(ecos[i].interval, ecos[j].interval, now)
                   for i in range(len(ecos)) for j in range(i + 1, len(ecos)))


def join_lists(a: EcoList, b: EcoList, now: TimePoint) -> EcoList | None:
    """Join two t-ordered lists of length k-1 that overlap in k-2 ECOs.

    Both inputs already satisfy the pairwise order, so the joined list is
    t-ordered exactly when its first ECO does not follow its last.
    """
    if len(a) != len(b) or not len(a):
        raise UsageError("join_lists needs two non-empty lists of equal length")
    if a.ecos[1:] != b.ecos[:-1]:
        raise UsageError(f"lists {a!r} and {b!r} do not overlap")
    if follows(a.ecos[0].interval, b.ecos[-1].interval, now):
        return None
    return a.append(b.ecos[-1])


def satisfiers(c: Constraint, ecos: Iterable[Eco],
               registry: FunctionRegistry = DEFAULT_REGISTRY,
               g: Granularity = MINUTE, *, now: TimePoint) -> list[Eco]:
    """ECOs satisfying ``c``.

    An attribute missing from every ECO's schema is an error; an attribute
    that only some categories have simply excludes ECOs of the others.
    """
    ecos = list(ecos)
    if ecos:
        unknown = c.attributes() - {a for e in ecos
                                    for a in (e.schema.id_attribute, *e.schema.attributes)}
        if unknown:
            raise UnknownAttributeError(sorted(unknown)[0])
    needed = c.attributes()
    return [e for e in ecos
            if all(e.schema.knows(a) for a in needed)
            and eco_satisfies(e, c, registry, g, now=now)]


def satisfying_list_levels(se: SequentialExpression, ecos: Iterable[Eco],
                           registry: FunctionRegistry = DEFAULT_REGISTRY,
                           g: Granularity = MINUTE, *, now: TimePoint,
                           cache: dict | None = None) -> list[list[EcoList]]:
    """Levelwise generation; entry ``j-1`` holds the t-ordered lists for the
    prefix ``SE_1..SE_j``.

    Level j for the window starting at constraint i joins level j-1 of
    windows i and i+1 on their shared k-2 ECOs.
    """
    ecos = list(ecos)
    cache = {} if cache is None else cache
    k = len(se)
    windows = []
    for c in se:
        if c not in cache:
            cache[c] = satisfiers(c, ecos, registry, g, now=now)
        windows.append([EcoList.of((e,)) for e in cache[c]])

    prefixes = [windows[0]]
    for _ in range(2, k + 1):
        joined_windows = []
        for left, right in zip(windows, windows[1:]):
            by_head = defaultdict(list)
            for b in right:
                by_head[b.ecos[:-1]].append(b)
            joined = []
            for a in left:
                for b in by_head.get(a.ecos[1:], ()):
                    out = join_lists(a, b, now)
                    if out is not None:
                        joined.append(out)
            joined_windows.append(joined)
        windows = joined_windows
        prefixes.append(windows[0])
    return prefixes


def generate_satisfying_lists(se: SequentialExpression, ecos: Iterable[Eco],
                              registry: FunctionRegistry = DEFAULT_REGISTRY,
                              g: Granularity = MINUTE, *, now: TimePoint,
                              cache: dict | None = None) -> SatisfyingListSet:
    levels = satisfying_list_levels(se, ecos, registry, g, now=now, cache=cache)
    return SatisfyingListSet(se, tuple(levels[-1]))


def _search(events: Sequence[EventTuple], k: int, lists: Iterable[EcoList],
            accept: Callable[[int, EventTuple, Eco], bool]) -> Match | None:
    """Backtrack over (list position, event index).

    Lists are walked as a prefix trie so lists sharing a prefix share work;
    failed (trie node, event index) pairs are memoised.
    """
    root: dict = {}
    for lst in lists:
        node = root
        for e in lst.ecos:
            node = node.setdefault(e, {})
    n = len(events)
    failed: set[tuple[int, int]] = set()
    chosen_events: list[EventTuple] = []
    chosen_ecos: list[Eco] = []

    def rec(node: dict, depth: int, start: int) -> bool:
        if depth == k:
            return True
        key = (id(node), start)
        if key in failed:
            return False
        # leave room for the k - depth - 1 tuples still to place
        for j in range(start, n - (k - depth) + 1):
            ev = events[j]
            for eco, child in node.items():
                if accept(depth, ev, eco):
                    chosen_events.append(ev)
                    chosen_ecos.append(eco)
                    if rec(child, depth + 1, j + 1):
                        return True
                    chosen_events.pop()
                    chosen_ecos.pop()
        failed.add(key)
        return False

    if k <= n and rec(root, 0, 0):
        return Match(tuple(chosen_events), EcoList.of(chosen_ecos))
    return None


def _ordered(events: Iterable[EventTuple]) -> list[EventTuple]:
    return sorted(events, key=lambda ev: ev.t)


def find_temporal_match(events: Iterable[EventTuple], se: SequentialExpression,
                        lists: SatisfyingListSet, *, now: TimePoint) -> Match | None:
    def accept(i, ev, eco):
        return contains(eco.interval, ev.t, now)

    m = _search(_ordered(events), len(se), lists, accept)
    return None if m is None else Match(m.events, m.ecos, se.constraints)


def find_total_match(events: Iterable[EventTuple], se: SequentialExpression,
                     lists: SatisfyingListSet,
                     registry: FunctionRegistry = DEFAULT_REGISTRY, *,
                     now: TimePoint) -> Match | None:
    def accept(i, ev, eco):
        return (ev.id == eco.id and contains(eco.interval, ev.t, now)
                and tuple_temporally_satisfies(ev, se[i], registry))

    m = _search(_ordered(events), len(se), lists, accept)
    return None if m is None else Match(m.events, m.ecos, se.constraints)


def temporal_match(events, se, lists, *, now) -> bool:
    return find_temporal_match(events, se, lists, now=now) is not None


def total_match(events, se, lists, registry=DEFAULT_REGISTRY, *, now) -> bool:
    return find_total_match(events, se, lists, registry, now=now) is not None


def temporal_support_se(se: SequentialExpression, ntoi: NormalizedToI,
                        registry: FunctionRegistry = DEFAULT_REGISTRY,
                        g: Granularity = MINUTE, *, now: TimePoint) -> SupportResult:
    lists = generate_satisfying_lists(se, ntoi.ecos, registry, g, now=now)
    verdicts = []
    for oid in ntoi.objects:
        events = ntoi.events(oid)
        tw = find_temporal_match(events, se, lists, now=now)
        # an object that cannot temporally match cannot totally match
        ow = find_total_match(events, se, lists, registry, now=now) if tw else None
        verdicts.append(ObjectVerdict(oid, tw is not None, ow is not None, tw, ow))
    return SupportResult.from_verdicts(verdicts)


@dataclass
class MatchContext:
    """Catalog, registry, granularity and the resolved Now for one query.

    The satisfier cache fills lazily; after warm-up it is only read, so one
    context can be shared by workers matching disjoint objects.
    """

    ecos: tuple[Eco, ...]
    now: TimePoint
    registry: FunctionRegistry = DEFAULT_REGISTRY
    granularity: Granularity = MINUTE
    _cache: dict = field(default_factory=dict, repr=False)

    def satisfiers(self, c: Constraint) -> list[Eco]:
        if c not in self._cache:
            self._cache[c] = satisfiers(c, self.ecos, self.registry,
                                        self.granularity, now=self.now)
        return self._cache[c]

    def warm(self, constraints: Iterable[Constraint]) -> None:
        for c in constraints:
            self.satisfiers(c)

    def lists(self, se: SequentialExpression) -> SatisfyingListSet:
        return generate_satisfying_lists(se, self.ecos, self.registry,
                                         self.granularity, now=self.now,
                                         cache=self._cache)
