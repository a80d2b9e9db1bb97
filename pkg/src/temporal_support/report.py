"""Query reports: a JSON document for machines and a table for people."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

from .sequences import Match, SupportResult
from .timecore import TimePoint, format_time


def decimal4(x: Fraction) -> str:
    q = Decimal(x.numerator) / Decimal(x.denominator)
    return str(q.quantize(Decimal("0.0001"), rounding=ROUND_HALF_EVEN))


def describe_match(m: Match | None) -> str | None:
    if m is None:
        return None
    return ", ".join(f"{format_time(ev.t)} {ev.id} -> {eco!r}"
                     for ev, eco in zip(m.events, m.ecos))


@dataclass
class Verdict:
    oid: str
    temporal: bool
    total: bool
    temporal_witness: str | None = None
    total_witness: str | None = None


@dataclass
class Report:
    query: str
    kind: str
    objects: int
    total_matchers: int
    temporal_matchers: int
    temporal_support: Fraction
    classic_support: Fraction
    now: str
    verdicts: list[Verdict] = field(default_factory=list)
    oracle: dict | None = None

    @classmethod
    def build(cls, query: str, kind: str, result: SupportResult, *, objects: int,
              classic: Fraction, now: TimePoint, oracle: dict | None = None) -> Report:
        verdicts = [Verdict(v.oid, v.temporal, v.total,
                            describe_match(v.temporal_witness),
                            describe_match(v.total_witness))
                    for v in result.verdicts]
        return cls(query, kind, objects, result.total_matchers,
                   result.temporal_matchers, result.support, classic,
                   format_time(now), verdicts, oracle)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("temporal_support", "classic_support"):
            value = getattr(self, key)
            d[key] = {"exact": str(value), "decimal": decimal4(value)}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        d = dict(d)
        for key in ("temporal_support", "classic_support"):
            d[key] = Fraction(d[key]["exact"])
        d["verdicts"] = [Verdict(**v) for v in d.get("verdicts", [])]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def render_text(self, explain: bool = False) -> str:
        rows = [
            ("query", self.query),
            ("kind", self.kind),
            ("now", self.now),
            ("objects", str(self.objects)),
            ("temporal matchers", str(self.temporal_matchers)),
            ("total matchers", str(self.total_matchers)),
            ("temporal support", f"{self.temporal_support} ({decimal4(self.temporal_support)})"),
            ("classic support", f"{self.classic_support} ({decimal4(self.classic_support)})"),
        ]
        if self.oracle is not None:
            rows.append(("oracle", "agrees"))
        width = max(len(k) for k, _ in rows)
        lines = [f"{k:<{width}}  {v}" for k, v in rows]
        if self.verdicts:
            oid_w = max(len("object"), *(len(v.oid) for v in self.verdicts))
            lines += ["", f"{'object':<{oid_w}}  temporal  total"]
            for v in self.verdicts:
                lines.append(f"{v.oid:<{oid_w}}  {'yes' if v.temporal else 'no':<8}  "
                             f"{'yes' if v.total else 'no'}")
                if explain:
                    if v.temporal_witness:
                        lines.append(f"{'':<{oid_w}}    temporal: {v.temporal_witness}")
                    if v.total_witness:
                        lines.append(f"{'':<{oid_w}}    total:    {v.total_witness}")
        return "\n".join(lines)
