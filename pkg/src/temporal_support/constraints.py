"""Constraint language: terms, atoms, conjunctive constraints, the function
registry with the built-in ``rollup``, and the two satisfiability checks
(against an ECO and against a single event tuple).

Surface syntax::

    [ID='A' & filter='B,C']
    [rollup(t,'hour','Time')='18']
    [t='11/29/2007 19:45']

``∧`` is accepted as a synonym for ``&``.  Literals use single quotes;
``\\'`` and ``\\\\`` escape inside them.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Union

from .catalog import TEMPORAL_ATTRIBUTE, Eco, EventTuple
from .errors import (EvaluationError, ExpressionSyntaxError, TimeFormatError,
                     UnknownAttributeError, UnknownFunctionError)
from .timecore import (MINUTE, Granularity, TimePoint, add_months, contains,
                       parse_time, to_datetime)


@dataclass(frozen=True)
class Attribute:
    name: str

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class TemporalAttribute:
    def render(self) -> str:
        return TEMPORAL_ATTRIBUTE


TIME = TemporalAttribute()


@dataclass(frozen=True)
class Function:
    name: str
    arg: Attribute | TemporalAttribute
    extra: tuple[str, ...] = ()

    def render(self) -> str:
        args = [self.arg.render(), *(quote(c) for c in self.extra)]
        return f"{self.name}({','.join(args)})"


Term = Union[Attribute, TemporalAttribute, Function]


@dataclass(frozen=True)
class Atom:
    left: Term
    right: str
    # cached parse of the literal when the atom is ``t='...'``
    time_point: TimePoint | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.left, TemporalAttribute) and self.time_point is None:
            object.__setattr__(self, "time_point", parse_time(self.right))

    @property
    def is_temporal(self) -> bool:
        if isinstance(self.left, Function):
            return isinstance(self.left.arg, TemporalAttribute)
        return isinstance(self.left, TemporalAttribute)

    @property
    def attribute(self) -> str | None:
        """The non-temporal attribute this atom reads, if any."""
        arg = self.left.arg if isinstance(self.left, Function) else self.left
        return arg.name if isinstance(arg, Attribute) else None

    def render(self) -> str:
        return f"{self.left.render()}={quote(self.right)}"


class Constraint:
    """A conjunction of atoms in square brackets.

    Equality ignores atom order but not multiplicity, so ``[a='1' & b='2']``
    and ``[b='2' & a='1']`` are the same automaton symbol.
    """

    __slots__ = ("atoms", "_key")

    def __init__(self, atoms):
        atoms = tuple(atoms)
        if not atoms:
            raise ValueError("a constraint needs at least one atom")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_key", tuple(sorted(Counter(atoms).items(),
                                                      key=lambda kv: kv[0].render())))

    def __setattr__(self, name, value):
        raise AttributeError("Constraint is immutable")

    def __eq__(self, other):
        return isinstance(other, Constraint) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def is_temporal(self) -> bool:
        return any(a.is_temporal for a in self.atoms)

    def attributes(self) -> set[str]:
        return {a.attribute for a in self.atoms if a.attribute is not None}

    def render(self) -> str:
        return "[" + " & ".join(a.render() for a in self.atoms) + "]"

    __str__ = render

    def __repr__(self) -> str:
        return f"Constraint({self.render()})"


def quote(text: str) -> str:
    return "'" + text.replace("\\", "\\\\").replace("'", "\\'") + "'"


# -- function registry --------------------------------------------------------

Evaluator = Callable[[Any, tuple], str]
ExistsEvaluator = Callable[[TimePoint, TimePoint, tuple, str], bool]


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    arity: int
    evaluate: Evaluator
    # optional fast path for "some t in [start, end] gives `target`"
    exists: ExistsEvaluator | None = None


class FunctionRegistry:
    def __init__(self, specs=()):
        self._specs = MappingProxyType({s.name: s for s in specs})

    def with_function(self, spec: FunctionSpec) -> FunctionRegistry:
        return FunctionRegistry([*self._specs.values(), spec])

    def __contains__(self, name: str) -> bool:
        return name in self._specs

    def get(self, name: str) -> FunctionSpec:
        try:
            return self._specs[name]
        except KeyError:
            raise UnknownFunctionError(f"unknown function {name!r}") from None

    def evaluate(self, name: str, arg, extra: tuple) -> str:
        return self.get(name).evaluate(arg, extra)

    def exists_in(self, name: str, start: TimePoint, end: TimePoint,
                  extra: tuple, target: str, g: Granularity = MINUTE) -> bool:
        spec = self.get(name)
        # the fast paths reason over every minute, so they only apply when
        # every minute is a valid instant
        if spec.exists is not None and g == MINUTE:
            return spec.exists(start, end, extra, target)
        return scan_exists(self, name, start, end, extra, target, g)


def scan_exists(registry: FunctionRegistry, name: str, start: TimePoint,
                end: TimePoint, extra: tuple, target: str,
                g: Granularity = MINUTE) -> bool:
    """Evaluate the function at every quantum of ``[start, end]``."""
    return any(registry.evaluate(name, t, extra) == target
               for t in g.points(start, end))


_LEVEL_FORMATS = {
    "minute": "%M",
    "hour": "%H",
    "day": "%d",
    "month": "%m",
    "year": "%Y",
}


def _check_rollup_args(extra: tuple) -> str:
    level, dimension = extra
    if dimension != "Time":
        raise EvaluationError(f"rollup: unknown dimension {dimension!r}")
    if level not in _LEVEL_FORMATS:
        raise EvaluationError(f"rollup: unknown level {level!r} in dimension 'Time'")
    return level


def rollup(t: TimePoint | str, level: str, dimension: str = "Time") -> str:
    """Member of ``t`` at ``level`` of the Time hierarchy, zero-padded."""
    level = _check_rollup_args((level, dimension))
    if isinstance(t, str):
        try:
            t = parse_time(t)
        except TimeFormatError as exc:
            raise EvaluationError(f"rollup: {exc}") from None
    return to_datetime(t).strftime(_LEVEL_FORMATS[level])


_BUCKET_MINUTES = {"minute": 1, "hour": 60, "day": 1440}
# consecutive buckets needed to see every member value of the level
_BUCKET_CYCLE = {"minute": 60, "hour": 24, "day": 62, "month": 12}


def _rollup_exists(start: TimePoint, end: TimePoint, extra: tuple,
                   target: str) -> bool:
    level = _check_rollup_args(extra)
    if level == "year":
        if not (target.isdigit() and len(target) == 4):
            return False
        return to_datetime(start).year <= int(target) <= to_datetime(end).year
    if level == "month":
        dt = to_datetime(start)
        cur = start - ((dt.day - 1) * 1440 + dt.hour * 60 + dt.minute)
        step = lambda t: add_months(t, 1)  # noqa: E731
    else:
        width = _BUCKET_MINUTES[level]
        cur = start - start % width
        step = lambda t: t + width  # noqa: E731
    fmt = _LEVEL_FORMATS[level]
    for _ in range(_BUCKET_CYCLE[level]):
        if cur > end:
            break
        if to_datetime(cur).strftime(fmt) == target:
            return True
        cur = step(cur)
    return False


ROLLUP = FunctionSpec("rollup", 3, lambda t, extra: rollup(t, *extra), _rollup_exists)
DEFAULT_REGISTRY = FunctionRegistry([ROLLUP])


# -- parsing ------------------------------------------------------------------

class _Cursor:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def error(self, message: str, pos: int | None = None):
        return ExpressionSyntaxError(message, self.text,
                                     self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of input"
            raise self.error(f"expected {ch!r}, found {found}")
        self.pos += 1

    def name(self) -> str:
        self.skip_ws()
        start = self.pos
        text = self.text
        if start < len(text) and (text[start].isalpha() or text[start] == "_"):
            self.pos += 1
            while self.pos < len(text) and (text[self.pos].isalnum()
                                            or text[self.pos] == "_"):
                self.pos += 1
            return text[start:self.pos]
        raise self.error("expected a name")

    def literal(self) -> str:
        if self.peek() != "'":
            raise self.error("expected a quoted literal")
        start = self.pos
        self.pos += 1
        out = []
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "\\" and self.pos + 1 < len(text):
                out.append(text[self.pos + 1])
                self.pos += 2
            elif ch == "'":
                self.pos += 1
                return "".join(out)
            else:
                out.append(ch)
                self.pos += 1
        raise self.error("unterminated literal", start)


def _parse_term(cur: _Cursor, registry: FunctionRegistry) -> Term:
    start = cur.pos
    name = cur.name()
    if cur.peek() != "(":
        return TIME if name == TEMPORAL_ATTRIBUTE else Attribute(name)
    if name not in registry:
        raise cur.error(f"unknown function {name!r}", start)
    cur.expect("(")
    arg_name = cur.name()
    arg = TIME if arg_name == TEMPORAL_ATTRIBUTE else Attribute(arg_name)
    extra = []
    while cur.peek() == ",":
        cur.pos += 1
        extra.append(cur.literal())
    cur.expect(")")
    arity = registry.get(name).arity
    if 1 + len(extra) != arity:
        raise cur.error(f"function {name!r} takes {arity} arguments, "
                        f"got {1 + len(extra)}", start)
    return Function(name, arg, tuple(extra))


def _parse_atom(cur: _Cursor, registry: FunctionRegistry) -> Atom:
    left = _parse_term(cur, registry)
    cur.expect("=")
    lit_pos = cur.pos
    right = cur.literal()
    try:
        return Atom(left, right)
    except TimeFormatError as exc:
        raise cur.error(str(exc), lit_pos) from None


def parse_constraint_at(text: str, pos: int,
                        registry: FunctionRegistry = DEFAULT_REGISTRY
                        ) -> tuple[Constraint, int]:
    """Parse one bracketed constraint starting at ``pos``; return it and the
    offset just past the closing bracket."""
    cur = _Cursor(text, pos)
    cur.expect("[")
    atoms = [_parse_atom(cur, registry)]
    while cur.peek() in ("&", "∧"):
        cur.pos += 1
        atoms.append(_parse_atom(cur, registry))
    cur.expect("]")
    return Constraint(atoms), cur.pos


def parse_constraint(text: str,
                     registry: FunctionRegistry = DEFAULT_REGISTRY) -> Constraint:
    constraint, end = parse_constraint_at(text, 0, registry)
    cur = _Cursor(text, end)
    if cur.peek():
        raise cur.error("unexpected trailing input")
    return constraint


# -- satisfiability -------------------------------------------------------------

def check_attributes(e: Eco, c: Constraint) -> None:
    for name in c.attributes():
        if not e.schema.knows(name):
            raise UnknownAttributeError(name, e.category)


def eco_satisfies(e: Eco, c: Constraint, registry: FunctionRegistry = DEFAULT_REGISTRY,
                  g: Granularity = MINUTE, *, now: TimePoint) -> bool:
    """Whether ECO ``e`` satisfies every atom of ``c``.

    Temporal atoms hold when some instant of the ECO's interval makes them
    true; ``now`` closes Now-ended intervals.
    """
    check_attributes(e, c)
    for atom in c.atoms:
        left = atom.left
        if isinstance(left, Attribute):
            ok = e.value(left.name) == atom.right
        elif isinstance(left, TemporalAttribute):
            ok = contains(e.interval, atom.time_point, now)
        elif isinstance(left.arg, Attribute):
            ok = registry.evaluate(left.name, e.value(left.arg.name), left.extra) == atom.right
        else:
            ok = registry.exists_in(left.name, e.interval.start,
                                    e.interval.resolve_end(now), left.extra,
                                    atom.right, g)
        if not ok:
            return False
    return True


def tuple_temporally_satisfies(mu: EventTuple, c: Constraint,
                               registry: FunctionRegistry = DEFAULT_REGISTRY) -> bool:
    """Check the temporal atoms of ``c`` at the tuple's transaction time.

    Non-temporal atoms impose nothing on a tuple, so a constraint without
    temporal atoms is satisfied by every tuple.
    """
    for atom in c.atoms:
        left = atom.left
        if isinstance(left, TemporalAttribute):
            if atom.time_point != mu.t:
                return False
        elif isinstance(left, Function) and isinstance(left.arg, TemporalAttribute):
            if registry.evaluate(left.name, mu.t, left.extra) != atom.right:
                return False
    return True
