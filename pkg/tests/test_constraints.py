import random

import pytest
from hypothesis import given, strategies as st

from randomdata import SCHEMA
from temporal_support.catalog import Eco, EventTuple
from temporal_support.constraints import (DEFAULT_REGISTRY, Attribute, Function,
                                          FunctionSpec, TemporalAttribute,
                                          eco_satisfies, parse_constraint,
                                          rollup, scan_exists,
                                          tuple_temporally_satisfies)
from temporal_support.errors import (EvaluationError, ExpressionSyntaxError,
                                     UnknownAttributeError)
from temporal_support.sequences import satisfiers
from temporal_support.timecore import Granularity, TimeInterval, parse_time


def T(hhmm: str) -> int:
    return parse_time(f"11/29/2007 {hhmm}")


def names(ecos):
    return {e.label.removeprefix("eco_") for e in ecos}


def test_parse_two_atom_constraint():
    c = parse_constraint("[ID='A' ∧ filter='B,C']")
    assert c == parse_constraint("[ID='A' & filter='B,C']")
    assert {(a.left, a.right) for a in c.atoms} == {
        (Attribute("ID"), "A"), (Attribute("filter"), "B,C")}


def test_parse_function_atom():
    [atom] = parse_constraint("[rollup(t,'hour','Time')='18']").atoms
    assert atom.left == Function("rollup", TemporalAttribute(), ("hour", "Time"))
    assert atom.right == "18"
    assert atom.is_temporal


@pytest.mark.parametrize("text", ["[keyword=]", "[keyword='x'", "keyword='x']",
                                  "['x'=keyword]", "[keyword='x' & ]", "[]",
                                  "[t='not a time']", "[nosuch(t,'a')='b']",
                                  "[rollup(t,'hour')='18']"])
def test_parse_errors(text):
    with pytest.raises(ExpressionSyntaxError):
        parse_constraint(text)


def test_syntax_error_reports_position():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_constraint("[keyword=]")
    assert info.value.position == 9


def test_structural_equality_is_atom_multiset_equality():
    a = parse_constraint("[ID='A' & keyword='x']")
    b = parse_constraint("[keyword='x'&ID='A']")
    assert a == b and hash(a) == hash(b)
    assert a != parse_constraint("[ID='A']")


def test_render_parse_round_trip():
    for text in ["[ID='A' & filter='B,C']", "[rollup(t,'hour','Time')='18']",
                 "[t='11/29/2007 19:46']", "[filter='']", "[keyword='it\\'s']"]:
        c = parse_constraint(text)
        assert parse_constraint(c.render()) == c


def test_games_satisfiers(webpages):
    ctx = webpages.context()
    assert names(ctx.satisfiers(parse_constraint("[keyword='Games']"))) == {"C2", "C3", "M1"}


def test_hour_rollup_satisfiers(webpages, eco):
    c = parse_constraint("[rollup(t,'hour','Time')='18']")
    assert eco_satisfies(eco("P1"), c, now=webpages.now)
    ctx = webpages.context()
    assert names(ctx.satisfiers(c)) == {"A2", "C2", "M1", "P1", "P2"}


def test_contradictory_conjunction_is_unsatisfiable(webpages):
    c = parse_constraint("[keyword='Games' & keyword='Books']")
    assert webpages.context().satisfiers(c) == []


def test_point_atom_uses_interval_membership(webpages, eco):
    c = parse_constraint("[t='11/29/2007 19:46']")
    assert eco_satisfies(eco("C3"), c, now=webpages.now)
    assert not eco_satisfies(eco("A1"), c, now=webpages.now)


def test_unknown_attribute_is_an_error_not_false(webpages, eco):
    c = parse_constraint("[colour='red']")
    with pytest.raises(UnknownAttributeError, match="colour"):
        eco_satisfies(eco("A1"), c, now=webpages.now)
    with pytest.raises(UnknownAttributeError, match="colour"):
        satisfiers(c, webpages.ntoi.ecos, now=webpages.now)


def test_function_over_an_attribute():
    reg = DEFAULT_REGISTRY.with_function(
        FunctionSpec("initial", 1, lambda v, extra: v[:1]))
    c = parse_constraint("[initial(keyword)='G']", reg)
    e = Eco(SCHEMA, "A", ("Games", ""), TimeInterval(0, 1))
    assert eco_satisfies(e, c, reg, now=0)


def test_tuple_level_satisfaction():
    mu = EventTuple("Session_1", T("19:45"), "C")
    assert tuple_temporally_satisfies(mu, parse_constraint("[filter='M']"))
    hour = parse_constraint("[rollup(t,'hour','Time')='18']")
    assert tuple_temporally_satisfies(EventTuple("o", T("18:51"), "P"), hour)
    assert not tuple_temporally_satisfies(mu, hour)
    assert not tuple_temporally_satisfies(mu, parse_constraint("[t='11/29/2007 19:46']"))
    assert tuple_temporally_satisfies(mu, parse_constraint("[t='11/29/2007 19:45']"))


def test_custom_function_over_time_at_tuple_level():
    reg = DEFAULT_REGISTRY.with_function(
        FunctionSpec("parity", 1, lambda t, extra: "even" if t % 2 == 0 else "odd"))
    c = parse_constraint("[parity(t)='even']", reg)
    assert tuple_temporally_satisfies(EventTuple("o", 10, "A"), c, reg)
    assert not tuple_temporally_satisfies(EventTuple("o", 11, "A"), c, reg)


def test_rollup_levels():
    assert rollup(T("18:52"), "hour", "Time") == "18"
    assert rollup("11/29/2007 18:52", "hour") == "18"
    assert rollup(T("18:00"), "day", "Time") == "29"
    assert rollup(T("18:07"), "minute", "Time") == "07"
    assert rollup(T("18:07"), "month", "Time") == "11"
    assert rollup(T("18:07"), "year", "Time") == "2007"
    with pytest.raises(EvaluationError):
        rollup(T("18:07"), "week", "Time")
    with pytest.raises(EvaluationError):
        rollup(T("18:07"), "hour", "Space")


def test_rollup_check_honours_coarse_granularity():
    e = Eco(SCHEMA, "A", ("x", ""), TimeInterval(T("10:00"), T("10:30")))
    c = parse_constraint("[rollup(t,'minute','Time')='05']")
    assert eco_satisfies(e, c, now=0)
    assert not eco_satisfies(e, c, g=Granularity.parse("15 minute"), now=0)


LEVELS = ["minute", "hour", "day", "month", "year"]
BASE = parse_time("01/20/2007 00:00")


@given(st.sampled_from(LEVELS),
       st.integers(min_value=0, max_value=400 * 1440),
       st.integers(min_value=0, max_value=1440),
       st.integers(min_value=0, max_value=70))
def test_analytic_rollup_check_matches_scan(level, offset, length, member):
    start = BASE + offset
    end = start + length
    target = str(2007 + member % 3) if level == "year" else f"{member:02d}"
    extra = (level, "Time")
    fast = DEFAULT_REGISTRY.get("rollup").exists(start, end, extra, target)
    assert fast == scan_exists(DEFAULT_REGISTRY, "rollup", start, end, extra, target)


def test_analytic_rollup_check_on_long_intervals():
    rng = random.Random(11)
    spec = DEFAULT_REGISTRY.get("rollup")
    for _ in range(200):
        start = BASE + rng.randrange(500 * 1440)
        end = start + rng.randrange(90 * 1440)
        level = rng.choice(["day", "month"])
        target = f"{rng.randrange(1, 32):02d}"
        extra = (level, "Time")
        # scan hour by hour is enough at day and month level
        slow = any(rollup(t, level) == target for t in range(start, end + 1, 60)) \
            or rollup(end, level) == target
        assert spec.exists(start, end, extra, target) == slow


@given(st.integers(min_value=0, max_value=10**7), st.sampled_from(LEVELS))
def test_point_interval_satisfaction_equals_tuple_satisfaction(t, level):
    target = rollup(t, level)
    c = parse_constraint(f"[rollup(t,'{level}','Time')='{target}']")
    e = Eco(SCHEMA, "A", ("x", ""), TimeInterval.point(t))
    assert eco_satisfies(e, c, now=0) == tuple_temporally_satisfies(EventTuple("o", t, "A"), c)
