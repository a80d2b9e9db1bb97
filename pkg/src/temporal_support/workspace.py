"""Flat-file workspaces: loading, validation and query execution.

A workspace is a directory holding::

    schemas.txt        category <name>; id <attr>; attrs <a1,a2,...>
    <name>.ecos        id | a1=v1; a2=v2 | MM/DD/YYYY HH:MM .. MM/DD/YYYY HH:MM|Now
    <name>.points      id | a1=v1; a2=v2 | MM/DD/YYYY HH:MM
    events.txt         oid | MM/DD/YYYY HH:MM | id

Blank lines and lines starting with ``#`` are ignored.  Values may be
single-quoted; quoting is required for empty values and for values
containing ``;``, ``|``, ``=`` or quotes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .catalog import (CategoryInstance, CategoryOccurrence, CategorySchema, Eco,
                      EventTuple, NormalizedToI, encode)
from .constraints import DEFAULT_REGISTRY, FunctionRegistry
from .errors import (IntegrityError, OracleMismatchError, TimeFormatError,
                     UsageError, WorkspaceFormatError)
from .oracle import brute_re_support, brute_se_support
from .regexp import as_sequential, compile_re, parse_re, re_temporal_support
from .report import Report
from .sequences import MatchContext, SupportResult, temporal_support_se
from .timecore import (MINUTE, NOW, Granularity, TimeInterval, TimePoint,
                       format_time, parse_time)

log = logging.getLogger(__name__)

SCHEMAS_FILE = "schemas.txt"
EVENTS_FILE = "events.txt"
_SPECIAL = set(";|='\\")


# -- line syntax ------------------------------------------------------------------

def _split(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside single-quoted literals."""
    parts, buf, quoted, i = [], [], False, 0
    while i < len(text):
        ch = text[i]
        if quoted and ch == "\\" and i + 1 < len(text):
            buf.append(text[i:i + 2])
            i += 2
            continue
        if ch == "'":
            quoted = not quoted
        if ch == sep and not quoted:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    if quoted:
        raise ValueError("unterminated quoted value")
    parts.append("".join(buf))
    return parts


def _unquote(raw: str) -> str:
    raw = raw.strip()
    if not raw.startswith("'"):
        return raw
    if len(raw) < 2 or not raw.endswith("'"):
        raise ValueError(f"malformed quoted value {raw!r}")
    body, out, i = raw[1:-1], [], 0
    while i < len(body):
        if body[i] == "\\" and i + 1 < len(body):
            out.append(body[i + 1])
            i += 2
        else:
            out.append(body[i])
            i += 1
    return "".join(out)


def render_value(value: str) -> str:
    if not value or value != value.strip() or _SPECIAL & set(value):
        return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return value


def _lines(path: Path):
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def _parse_values(raw: str, schema: CategorySchema) -> tuple[str, ...]:
    values = {}
    if raw.strip():
        for pair in _split(raw, ";"):
            if not pair.strip():
                continue
            name, eq, value = pair.partition("=")
            name = name.strip()
            if not eq:
                raise ValueError(f"expected attr=value, got {pair.strip()!r}")
            if name not in schema.attributes:
                raise ValueError(f"unknown attribute {name!r} for category {schema.name!r}")
            if name in values:
                raise ValueError(f"attribute {name!r} given twice")
            values[name] = _unquote(value)
    missing = [a for a in schema.attributes if a not in values]
    if missing:
        raise ValueError(f"missing attribute(s) {', '.join(missing)}")
    return tuple(values[a] for a in schema.attributes)


def _fields(line: str, n: int) -> list[str]:
    parts = _split(line, "|")
    if len(parts) != n:
        raise ValueError(f"expected {n} '|'-separated fields, got {len(parts)}")
    return parts


def parse_schemas(path: Path) -> dict[str, CategorySchema]:
    schemas = {}
    for lineno, line in _lines(path):
        try:
            spec = {}
            for part in line.split(";"):
                key, _, value = part.strip().partition(" ")
                spec[key] = value.strip()
            name, ident = spec.get("category"), spec.get("id")
            if not name or not ident:
                raise ValueError("expected 'category <name>; id <attr>; attrs <a1,...>'")
            attrs = tuple(a.strip() for a in spec.get("attrs", "").split(",") if a.strip())
            if name in schemas:
                raise ValueError(f"category {name!r} declared twice")
            schemas[name] = CategorySchema(name, ident, attrs)
        except (ValueError, IntegrityError) as exc:
            raise WorkspaceFormatError(str(path), lineno, str(exc)) from None
    return schemas


def parse_ecos(path: Path, schema: CategorySchema) -> list[Eco]:
    ecos = []
    for lineno, line in _lines(path):
        try:
            ident, raw_values, raw_interval = _fields(line, 3)
            start, sep, end = raw_interval.partition("..")
            if not sep:
                raise ValueError("expected '<start> .. <end>'")
            end = end.strip()
            interval = TimeInterval(parse_time(start),
                                    NOW if end == "Now" else parse_time(end))
            ecos.append(Eco(schema, _unquote(ident), _parse_values(raw_values, schema),
                            interval))
        except ValueError as exc:
            raise WorkspaceFormatError(str(path), lineno, str(exc)) from None
    return ecos


def parse_points(path: Path, schema: CategorySchema) -> CategoryInstance:
    occurrences = []
    for lineno, line in _lines(path):
        try:
            ident, raw_values, raw_t = _fields(line, 3)
            occurrences.append(CategoryOccurrence(
                _unquote(ident), _parse_values(raw_values, schema), parse_time(raw_t)))
        except ValueError as exc:
            raise WorkspaceFormatError(str(path), lineno, str(exc)) from None
    try:
        return CategoryInstance(schema, tuple(occurrences))
    except IntegrityError as exc:
        raise IntegrityError(f"{path}: {exc}") from None


def parse_events(path: Path) -> list[EventTuple]:
    events = []
    for lineno, line in _lines(path):
        try:
            oid, raw_t, ident = _fields(line, 3)
            events.append(EventTuple(_unquote(oid), parse_time(raw_t), _unquote(ident)))
        except ValueError as exc:
            raise WorkspaceFormatError(str(path), lineno, str(exc)) from None
    return events


def render_schema(schema: CategorySchema) -> str:
    return (f"category {schema.name}; id {schema.id_attribute}; "
            f"attrs {','.join(schema.attributes)}")


def render_eco(e: Eco) -> str:
    values = "; ".join(f"{a}={render_value(v)}" for a, v in e.items())
    return f"{render_value(e.id)} | {values} | {e.interval.render()}"


def render_occurrence(occ: CategoryOccurrence, schema: CategorySchema) -> str:
    values = "; ".join(f"{a}={render_value(v)}"
                       for a, v in zip(schema.attributes, occ.values))
    return f"{render_value(occ.id)} | {values} | {format_time(occ.t)}"


def render_event(ev: EventTuple) -> str:
    return f"{render_value(ev.oid)} | {format_time(ev.t)} | {render_value(ev.id)}"


# -- workspace -------------------------------------------------------------------

@dataclass(frozen=True)
class Workspace:
    schemas: dict[str, CategorySchema]
    ntoi: NormalizedToI
    now: TimePoint
    granularity: Granularity = MINUTE
    registry: FunctionRegistry = field(default=DEFAULT_REGISTRY, compare=False)
    root: Path | None = None

    def context(self) -> MatchContext:
        return MatchContext(self.ntoi.ecos, self.now, self.registry, self.granularity)

    @property
    def ecos(self) -> tuple[Eco, ...]:
        return self.ntoi.ecos


def default_now(ntoi: NormalizedToI) -> TimePoint:
    """Latest transaction time; without events, the latest ECO bound."""
    latest = ntoi.max_transaction_time()
    if latest is not None:
        return latest
    bounds = [b for e in ntoi.ecos
              for b in (e.interval.start, e.interval.end) if b is not NOW]
    return max(bounds, default=0)


def build_workspace(schemas: dict[str, CategorySchema],
                    ecos: dict[str, Iterable[Eco]], events: Iterable[EventTuple],
                    *, granularity: Granularity = MINUTE, now: TimePoint | None = None,
                    registry: FunctionRegistry = DEFAULT_REGISTRY,
                    root: Path | None = None) -> Workspace:
    ntoi = NormalizedToI.build(events, ecos, granularity)
    return Workspace(schemas, ntoi, default_now(ntoi) if now is None else now,
                     granularity, registry, root)


def load_workspace(root: str | Path, *, granularity: Granularity = MINUTE,
                   now: TimePoint | None = None,
                   registry: FunctionRegistry = DEFAULT_REGISTRY) -> Workspace:
    root = Path(root)
    schema_path = root / SCHEMAS_FILE
    if not schema_path.is_file():
        raise FileNotFoundError(f"no {SCHEMAS_FILE} in workspace {root}")
    schemas = parse_schemas(schema_path)
    ecos: dict[str, list[Eco]] = {}
    for name, schema in schemas.items():
        ecos[name] = []
        eco_path, point_path = root / f"{name}.ecos", root / f"{name}.points"
        if eco_path.is_file():
            ecos[name].extend(parse_ecos(eco_path, schema))
        if point_path.is_file():
            ecos[name].extend(encode(parse_points(point_path, schema), granularity))
        log.debug("category %s: %d ECOs", name, len(ecos[name]))
    events_path = root / EVENTS_FILE
    events = parse_events(events_path) if events_path.is_file() else []
    return build_workspace(schemas, ecos, events, granularity=granularity, now=now,
                           registry=registry, root=root)


# -- queries ----------------------------------------------------------------------

def _classic(result: SupportResult, ws: Workspace) -> Fraction:
    n = len(ws.ntoi)
    return Fraction(result.total_matchers, n) if n else Fraction(0)


def evaluate(ws: Workspace, query_text: str, kind: str = "auto"
             ) -> tuple[str, SupportResult, object]:
    """Parse and evaluate a query; returns (kind, result, parsed query)."""
    node = parse_re(query_text, ws.registry)
    se = as_sequential(node)
    if kind == "auto":
        kind = "se" if se is not None else "re"
    if kind == "se":
        if se is None:
            raise UsageError("query is not a sequential expression; use --kind re")
        result = temporal_support_se(se, ws.ntoi, ws.registry, ws.granularity,
                                     now=ws.now)
        return kind, result, se
    if kind == "re":
        automaton = compile_re(node)
        return kind, re_temporal_support(automaton, ws.ntoi, ws.context()), automaton
    raise UsageError(f"unknown query kind {kind!r}")


def run_query(ws: Workspace, query_text: str, *, kind: str = "auto",
              oracle: bool = False) -> Report:
    kind, result, parsed = evaluate(ws, query_text, kind)
    oracle_counts = None
    if oracle:
        ctx = ws.context()
        check = (brute_se_support(parsed, ws.ntoi, ctx) if kind == "se"
                 else brute_re_support(parsed, ws.ntoi, ctx))
        mine = (result.total_matchers, result.temporal_matchers)
        theirs = (check.total_matchers, check.temporal_matchers)
        if mine != theirs:
            raise OracleMismatchError(
                f"{query_text}: engine (total, temporal) = {mine}, oracle = {theirs}")
        oracle_counts = {"total_matchers": theirs[0], "temporal_matchers": theirs[1],
                         "agrees": True}
    return Report.build(query_text, kind, result, objects=len(ws.ntoi),
                        classic=_classic(result, ws), now=ws.now, oracle=oracle_counts)


def classic_support(ws: Workspace, pattern: str, kind: str = "auto") -> Fraction:
    """Objects totally matching ``pattern`` over all objects in the table."""
    _, result, _ = evaluate(ws, pattern, kind)
    return _classic(result, ws)


def parse_now(text: str | None) -> TimePoint | None:
    if text is None:
        return None
    try:
        return parse_time(text)
    except TimeFormatError as exc:
        raise UsageError(str(exc)) from None


def fixture_path(name: str) -> Path:
    """Directory of a workspace shipped with the package (``webpages``,
    ``urls-intro``)."""
    return Path(__file__).parent / "fixtures" / name
