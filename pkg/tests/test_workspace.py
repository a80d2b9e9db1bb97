from fractions import Fraction

import pytest

from temporal_support.errors import (IntegrityError, OracleMismatchError,
                                     UsageError, WorkspaceFormatError)
from temporal_support.report import Report, decimal4
from temporal_support.sequences import SupportResult
from temporal_support.timecore import TimeInterval, parse_time
from temporal_support.workspace import (_split, _unquote, classic_support,
                                        fixture_path, load_workspace,
                                        parse_ecos, render_eco, render_value,
                                        run_query)
from temporal_support import workspace as workspace_module

SCHEMA_LINE = "category Page; id ID; attrs keyword,filter\n"


def make(tmp_path, ecos="", events="", points=None):
    (tmp_path / "schemas.txt").write_text(SCHEMA_LINE)
    (tmp_path / "Page.ecos").write_text(ecos)
    (tmp_path / "events.txt").write_text(events)
    if points is not None:
        (tmp_path / "Page.points").write_text(points)
    return tmp_path


def test_fixture_workspaces_load(webpages, intro):
    assert len(webpages.ecos) == 8 and len(webpages.ntoi) == 3
    assert webpages.now == parse_time("11/29/2007 20:00")
    assert len(intro.ecos) == 5 and intro.ntoi.objects == ["s1", "s2", "s3"]


def test_queries_on_the_fixtures(webpages, intro):
    assert run_query(webpages, "[ID='P'].[filter='M']").temporal_support == Fraction(1, 2)
    games = run_query(webpages, "[keyword='Games'].([filter=''])*")
    assert games.kind == "re" and games.temporal_support == 1
    cbc = run_query(intro, "[ID='C'].[ID='B'].[ID='C']", oracle=True)
    assert (cbc.temporal_support, cbc.classic_support) == (1, Fraction(2, 3))
    assert classic_support(intro, "[ID='C'].[ID='B']") == Fraction(2, 3)


def test_kind_selection(webpages):
    assert run_query(webpages, "[ID='P'].[filter='M']", kind="re").temporal_support == Fraction(1, 2)
    with pytest.raises(UsageError):
        run_query(webpages, "[ID='P']*", kind="se")
    with pytest.raises(UsageError):
        run_query(webpages, "[ID='P']", kind="xml")


def test_empty_event_file_gives_zero_supports(tmp_path):
    ws = load_workspace(make(tmp_path, "A | keyword=x; filter='' | 01/01/2020 10:00 .. Now\n"))
    assert len(ws.ntoi) == 0
    assert ws.now == parse_time("01/01/2020 10:00")
    report = run_query(ws, "[ID='A']")
    assert (report.temporal_support, report.classic_support) == (0, 0)
    assert classic_support(ws, "[ID='A']*") == 0


def test_points_files_are_encoded_on_load(tmp_path):
    points = "".join(f"A | keyword=x; filter='' | 01/01/2020 10:0{m}\n" for m in range(4))
    ws = load_workspace(make(tmp_path, points=points))
    [eco] = ws.ecos
    assert eco.interval == TimeInterval(parse_time("01/01/2020 10:00"),
                                        parse_time("01/01/2020 10:03"))


@pytest.mark.parametrize("ecos, message", [
    ("A | keyword=x | 01/01/2020 10:00 .. Now\n", "missing attribute"),
    ("A | keyword=x; filter=y; colour=z | 01/01/2020 10:00 .. Now\n", "unknown attribute"),
    ("A | keyword=x; filter=y\n", "fields"),
    ("A | keyword=x; filter=y | 01/01/2020 10:00\n", "'<start> .. <end>'"),
    ("A | keyword=x; filter=y | yesterday .. Now\n", "yesterday"),
    ("A | keyword='x; filter=y | 01/01/2020 10:00 .. Now\n", "unterminated"),
])
def test_malformed_eco_lines_name_file_and_line(tmp_path, ecos, message):
    root = make(tmp_path, "# header\n" + ecos)
    with pytest.raises(WorkspaceFormatError, match=message) as info:
        load_workspace(root)
    assert info.value.line == 2
    assert str(info.value).startswith(f"{root / 'Page.ecos'}:2:")


def test_malformed_event_and_schema_lines(tmp_path):
    root = make(tmp_path, events="s1 | 01/01/2020 10:00\n")
    with pytest.raises(WorkspaceFormatError, match="events.txt:1"):
        load_workspace(root)
    (root / "schemas.txt").write_text("category Page; attrs x\n")
    with pytest.raises(WorkspaceFormatError, match="schemas.txt:1"):
        load_workspace(root)


def test_integrity_violations_are_reported(tmp_path):
    overlapping = ("A | keyword=x; filter=y | 01/01/2020 10:00 .. 01/01/2020 10:05\n"
                   "A | keyword=z; filter=y | 01/01/2020 10:05 .. Now\n")
    with pytest.raises(IntegrityError, match="overlap"):
        load_workspace(make(tmp_path, overlapping))
    dup = ("A | keyword=x; filter=y | 01/01/2020 10:00\n"
           "A | keyword=z; filter=y | 01/01/2020 10:00\n")
    with pytest.raises(IntegrityError, match="Page.points"):
        load_workspace(make(tmp_path, points=dup))


def test_missing_workspace(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_workspace(tmp_path / "nowhere")


def test_value_quoting_round_trip():
    for value in ["", "plain", "a;b", "x|y", "k=v", "it's", " padded ", "back\\slash"]:
        rendered = render_value(value)
        assert _unquote(rendered) == value
        assert len(_split(f"{rendered}|tail", "|")) == 2


def test_eco_lines_round_trip(webpages, tmp_path):
    schema = webpages.schemas["WebPage"]
    path = tmp_path / "WebPage.ecos"
    path.write_text("\n".join(render_eco(e) for e in webpages.ecos) + "\n")
    back = parse_ecos(path, schema)
    assert [(e.id, e.values, e.interval) for e in back] == [
        (e.id, e.values, e.interval) for e in webpages.ecos]


def test_now_override_changes_open_intervals():
    # with Now pinned at 19:31, eco_C3 closes before any later tuple of
    # Session_1 or Session_3 can land in it
    ws = load_workspace(fixture_path("webpages"), now=parse_time("11/29/2007 19:31"))
    report = run_query(ws, "[ID='P'].[filter='M']")
    assert (report.total_matchers, report.temporal_matchers) == (0, 0)
    ws = load_workspace(fixture_path("webpages"), now=parse_time("11/29/2007 19:45"))
    report = run_query(ws, "[ID='P'].[filter='M']")
    assert (report.total_matchers, report.temporal_matchers) == (1, 2)


def test_report_json_round_trip(webpages):
    report = run_query(webpages, "[ID='P'].[filter='M']", oracle=True)
    back = Report.from_json(report.to_json())
    assert back == report
    d = report.to_dict()
    assert d["temporal_support"] == {"exact": "1/2", "decimal": "0.5000"}
    assert d["oracle"]["agrees"] is True
    assert [v["oid"] for v in d["verdicts"]] == ["Session_1", "Session_2", "Session_3"]


def test_report_text_lists_witnesses(webpages):
    text = run_query(webpages, "[ID='P'].[filter='M']").render_text(explain=True)
    assert "temporal support   1/2 (0.5000)" in text
    assert "11/29/2007 17:00 P -> eco_P1, 11/29/2007 19:45 C -> eco_C3" in text


def test_decimal_rounding():
    assert decimal4(Fraction(2, 3)) == "0.6667"
    assert decimal4(Fraction(1, 20000)) == "0.0000"  # half-even
    assert decimal4(Fraction(3, 20000)) == "0.0002"


def test_oracle_disagreement_is_raised(webpages, monkeypatch):
    monkeypatch.setattr(workspace_module, "brute_se_support",
                        lambda *a: SupportResult(0, 0))
    with pytest.raises(OracleMismatchError):
        run_query(webpages, "[ID='P'].[filter='M']", oracle=True)
