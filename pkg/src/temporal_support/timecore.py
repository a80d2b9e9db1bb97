"""Point-based time, granularities, intervals and the ``follows`` relation.

Time points are plain ``int`` minute counts since 1970-01-01 00:00 (naive,
no time zone).  Coarser granularities are views over that minute axis: an
hour quantum is 60 minutes, a month quantum steps the calendar month.
"""

from __future__ import annotations

import calendar
import enum
from dataclasses import dataclass
from datetime import datetime, timedelta

from .errors import TimeFormatError

EPOCH = datetime(1970, 1, 1)
CALENDAR_FORMAT = "%m/%d/%Y %H:%M"

TimePoint = int


class TimeUnit(str, enum.Enum):
    MINUTE = "minute"
    HOUR = "hour"
    DAY = "day"
    MONTH = "month"
    YEAR = "year"


_FIXED_MINUTES = {TimeUnit.MINUTE: 1, TimeUnit.HOUR: 60, TimeUnit.DAY: 1440}


def to_datetime(t: TimePoint) -> datetime:
    return EPOCH + timedelta(minutes=t)


def from_datetime(dt: datetime) -> TimePoint:
    delta = dt - EPOCH
    return delta.days * 1440 + delta.seconds // 60


def parse_time(text: str) -> TimePoint:
    """Parse ``MM/DD/YYYY HH:MM`` into a minute count."""
    try:
        return from_datetime(datetime.strptime(text.strip(), CALENDAR_FORMAT))
    except ValueError:
        raise TimeFormatError(
            f"expected MM/DD/YYYY HH:MM, got {text!r}") from None


def format_time(t: TimePoint) -> str:
    return to_datetime(t).strftime(CALENDAR_FORMAT)


def add_months(t: TimePoint, months: int) -> TimePoint:
    dt = to_datetime(t)
    y, m = divmod(dt.month - 1 + months, 12)
    year, month = dt.year + y, m + 1
    day = min(dt.day, calendar.monthrange(year, month)[1])
    return from_datetime(dt.replace(year=year, month=month, day=day))


@dataclass(frozen=True)
class Granularity:
    unit: TimeUnit = TimeUnit.MINUTE
    step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "unit", TimeUnit(self.unit))
        if self.step < 1:
            raise ValueError("granularity step must be positive")

    @classmethod
    def parse(cls, text: str) -> Granularity:
        """Accept ``minute``, ``hour``, or a stepped form such as ``15 minute``."""
        parts = text.split()
        try:
            if len(parts) == 1:
                return cls(TimeUnit(parts[0].lower()))
            if len(parts) == 2:
                return cls(TimeUnit(parts[1].lower()), int(parts[0]))
        except ValueError:
            pass
        raise TimeFormatError(f"unknown granularity {text!r}")

    def successor(self, t: TimePoint) -> TimePoint:
        if self.unit in _FIXED_MINUTES:
            return t + self.step * _FIXED_MINUTES[self.unit]
        months = self.step * (12 if self.unit is TimeUnit.YEAR else 1)
        return add_months(t, months)

    def points(self, start: TimePoint, end: TimePoint):
        """Yield every quantum from ``start`` up to and including ``end``."""
        t = start
        while t <= end:
            yield t
            t = self.successor(t)

    def __str__(self) -> str:
        return self.unit.value if self.step == 1 else f"{self.step} {self.unit.value}"


MINUTE = Granularity()


class _Now:
    """Marker for the open right end of a currently valid interval."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Now"

    def __reduce__(self):
        return (_Now, ())


NOW = _Now()


@dataclass(frozen=True)
class TimeInterval:
    start: TimePoint
    end: TimePoint | _Now

    def __post_init__(self):
        if self.end is not NOW and self.end < self.start:
            raise ValueError(
                f"interval end {format_time(self.end)} precedes start "
                f"{format_time(self.start)}")

    def __lt__(self, other):
        return self._key() < other._key()

    def _key(self):
        return (self.start, float("inf") if self.end is NOW else self.end)

    @classmethod
    def point(cls, t: TimePoint) -> TimeInterval:
        return cls(t, t)

    @property
    def open_ended(self) -> bool:
        return self.end is NOW

    def resolve_end(self, now: TimePoint) -> TimePoint:
        # an interval that starts after `now` still contains its own start
        if self.end is NOW:
            return max(self.start, now)
        return self.end

    def resolved(self, now: TimePoint) -> TimeInterval:
        return TimeInterval(self.start, self.resolve_end(now))

    def render(self) -> str:
        end = "Now" if self.end is NOW else format_time(self.end)
        return f"{format_time(self.start)} .. {end}"

    def __repr__(self) -> str:
        return f"[{self.render().replace(' .. ', ', ')}]"


def follows(a: TimeInterval, b: TimeInterval, now: TimePoint) -> bool:
    """True iff ``a`` starts at or after the (resolved) end of ``b``."""
    return a.start >= b.resolve_end(now)


def contains(i: TimeInterval, t: TimePoint, now: TimePoint) -> bool:
    return i.start <= t <= i.resolve_end(now)
