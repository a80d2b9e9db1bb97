"""Category schemas, point-based occurrences, interval encoding and the
normalized table of items."""

from __future__ import annotations

import dataclasses
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import IntegrityError, UnknownAttributeError
from .timecore import (MINUTE, NOW, Granularity, TimeInterval, TimePoint,
                       contains, format_time)

TEMPORAL_ATTRIBUTE = "t"


@dataclass(frozen=True)
class CategorySchema:
    name: str
    id_attribute: str
    attributes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        names = (self.id_attribute, *self.attributes)
        if len(set(names)) != len(names):
            raise IntegrityError(
                f"category {self.name!r}: attribute names must be distinct "
                f"from each other and from the identifier {self.id_attribute!r}")
        if TEMPORAL_ATTRIBUTE in names:
            raise IntegrityError(
                f"category {self.name!r}: {TEMPORAL_ATTRIBUTE!r} is reserved "
                "for the temporal attribute")

    def knows(self, attribute: str) -> bool:
        return attribute == self.id_attribute or attribute in self.attributes


@dataclass(frozen=True)
class CategoryOccurrence:
    id: str
    values: tuple[str, ...]
    t: TimePoint


@dataclass(frozen=True)
class CategoryInstance:
    schema: CategorySchema
    occurrences: tuple[CategoryOccurrence, ...]

    def __post_init__(self):
        object.__setattr__(self, "occurrences", tuple(self.occurrences))
        seen = set()
        width = len(self.schema.attributes)
        for occ in self.occurrences:
            if len(occ.values) != width:
                raise IntegrityError(
                    f"occurrence of {occ.id!r} at {format_time(occ.t)} has "
                    f"{len(occ.values)} values, schema {self.schema.name!r} "
                    f"expects {width}")
            key = (occ.id, occ.t)
            if key in seen:
                raise IntegrityError(
                    f"duplicate occurrence (ID={occ.id!r}, "
                    f"t={format_time(occ.t)}) in category {self.schema.name!r}")
            seen.add(key)


@dataclass(frozen=True)
class Eco:
    """Encoded category occurrence: one value list valid over an interval."""

    schema: CategorySchema
    id: str
    values: tuple[str, ...]
    interval: TimeInterval
    label: str | None = field(default=None, compare=False)

    @property
    def category(self) -> str:
        return self.schema.name

    def value(self, attribute: str) -> str:
        if attribute == self.schema.id_attribute:
            return self.id
        try:
            return self.values[self.schema.attributes.index(attribute)]
        except ValueError:
            raise UnknownAttributeError(attribute, self.schema.name) from None

    def items(self) -> list[tuple[str, str]]:
        return list(zip(self.schema.attributes, self.values))

    @property
    def name(self) -> str:
        return self.label or f"{self.id}@{self.interval!r}"

    def __repr__(self) -> str:
        return self.label or f"Eco({self.id!r}, {self.values!r}, {self.interval!r})"


@dataclass(frozen=True)
class EventTuple:
    oid: str
    t: TimePoint
    id: str

    def __repr__(self) -> str:
        return f"<{self.oid}, {format_time(self.t)}, {self.id}>"


def label_ecos(ecos: Iterable[Eco]) -> list[Eco]:
    """Name ECOs ``eco_<id><n>`` with n counting from 1 in start order per id."""
    by_id: dict[str, list[Eco]] = defaultdict(list)
    for e in ecos:
        by_id[e.id].append(e)
    out = []
    for ident in sorted(by_id):
        for n, e in enumerate(sorted(by_id[ident], key=lambda e: e.interval), 1):
            out.append(dataclasses.replace(e, label=f"eco_{ident}{n}"))
    return out


def encode(instance: CategoryInstance, g: Granularity = MINUTE) -> list[Eco]:
    """Collapse point occurrences into the minimal set of ECOs.

    A run continues while the value list is unchanged and each timestamp is
    exactly one quantum after the previous one.
    """
    by_id: dict[str, list[CategoryOccurrence]] = defaultdict(list)
    for occ in instance.occurrences:
        by_id[occ.id].append(occ)

    ecos = []
    for ident, occs in by_id.items():
        occs.sort(key=lambda o: o.t)
        run_start = prev = occs[0]
        for occ in occs[1:]:
            if occ.values != prev.values or occ.t != g.successor(prev.t):
                ecos.append(Eco(instance.schema, ident, run_start.values,
                                TimeInterval(run_start.t, prev.t)))
                run_start = occ
            prev = occ
        ecos.append(Eco(instance.schema, ident, run_start.values,
                        TimeInterval(run_start.t, prev.t)))
    return label_ecos(ecos)


def expand(ecos: Iterable[Eco], g: Granularity = MINUTE, now: TimePoint = 0,
           schema: CategorySchema | None = None) -> CategoryInstance:
    """Inverse of :func:`encode`; ECOs ending at Now expand up to ``now``."""
    ecos = list(ecos)
    if schema is None:
        if not ecos:
            raise ValueError("expanding an empty ECO set needs an explicit schema")
        schema = ecos[0].schema
    occurrences = []
    for e in ecos:
        if e.schema != schema:
            raise IntegrityError(
                f"cannot expand {e!r}: category {e.category!r} is not "
                f"{schema.name!r}")
        for t in g.points(e.interval.start, e.interval.resolve_end(now)):
            occurrences.append(CategoryOccurrence(e.id, e.values, t))
    return CategoryInstance(schema, tuple(occurrences))


def validate_ecos(ecos: Iterable[Eco], g: Granularity = MINUTE) -> None:
    """Raise :class:`IntegrityError` unless every (id, t) resolves to at most
    one ECO and no two same-valued ECOs could have been merged."""
    by_id: dict[str, list[Eco]] = defaultdict(list)
    for e in ecos:
        if len(e.values) != len(e.schema.attributes):
            raise IntegrityError(
                f"{e!r} has {len(e.values)} values, schema "
                f"{e.schema.name!r} expects {len(e.schema.attributes)}")
        by_id[e.id].append(e)
    for ident, group in by_id.items():
        group.sort(key=lambda e: e.interval)
        for a, b in zip(group, group[1:]):
            if a.interval.end is NOW or b.interval.start <= a.interval.end:
                raise IntegrityError(
                    f"ECOs for ID={ident!r} overlap: {a.interval!r} and "
                    f"{b.interval!r}")
            if (a.schema == b.schema and a.values == b.values
                    and b.interval.start == g.successor(a.interval.end)):
                raise IntegrityError(
                    f"ECOs for ID={ident!r} at {a.interval!r} and "
                    f"{b.interval!r} are adjacent with identical values; "
                    "the encoding is not minimal")


def resolve_eco(ecos: Iterable[Eco] | Mapping[str, Iterable[Eco]], ident: str,
                t: TimePoint, now: TimePoint) -> Eco | None:
    """The ECO with identifier ``ident`` valid at ``t``, if any."""
    if isinstance(ecos, Mapping):
        ecos = (e for group in ecos.values() for e in group)
    for e in ecos:
        if e.id == ident and contains(e.interval, t, now):
            return e
    return None


class NormalizedToI:
    """Event table ``(OID, t, ID)`` plus one ECO table per category.

    Immutable after construction; ``build`` validates eagerly.
    """

    def __init__(self, events: Mapping[str, tuple[EventTuple, ...]],
                 categories: Mapping[str, tuple[Eco, ...]]):
        self._events = dict(events)
        self._categories = dict(categories)
        self._by_id: dict[str, list[Eco]] = defaultdict(list)
        for e in self.ecos:
            self._by_id[e.id].append(e)

    @classmethod
    def build(cls, events: Iterable[EventTuple],
              categories: Mapping[str, Iterable[Eco]],
              g: Granularity = MINUTE) -> NormalizedToI:
        grouped: dict[str, list[EventTuple]] = {}
        for ev in events:
            grouped.setdefault(ev.oid, []).append(ev)
        for oid, evs in grouped.items():
            evs.sort(key=lambda ev: ev.t)
            for a, b in zip(evs, evs[1:]):
                if a.t == b.t:
                    raise IntegrityError(
                        f"object {oid!r} has two tuples at {format_time(a.t)}")
        cats = {name: tuple(label_ecos(ecos)) for name, ecos in categories.items()}
        validate_ecos((e for group in cats.values() for e in group), g)
        return cls({oid: tuple(evs) for oid, evs in grouped.items()}, cats)

    @property
    def objects(self) -> list[str]:
        return list(self._events)

    @property
    def categories(self) -> dict[str, tuple[Eco, ...]]:
        return dict(self._categories)

    @property
    def ecos(self) -> tuple[Eco, ...]:
        return tuple(e for group in self._categories.values() for e in group)

    def events(self, oid: str) -> tuple[EventTuple, ...]:
        return self._events[oid]

    def all_events(self):
        for evs in self._events.values():
            yield from evs

    def __len__(self) -> int:
        return len(self._events)

    def max_transaction_time(self) -> TimePoint | None:
        times = [ev.t for ev in self.all_events()]
        return max(times) if times else None

    def resolve(self, ev: EventTuple, now: TimePoint) -> Eco | None:
        return resolve_eco(self._by_id.get(ev.id, ()), ev.id, ev.t, now)

    def eco(self, label: str) -> Eco:
        for e in self.ecos:
            if e.label == label:
                return e
        raise KeyError(label)
