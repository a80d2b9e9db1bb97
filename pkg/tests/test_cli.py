import json

import pytest

from temporal_support.cli import WORKSPACE_ENV, main
from temporal_support.workspace import fixture_path

WEB = str(fixture_path("webpages"))
INTRO = str(fixture_path("urls-intro"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_support_text(capsys):
    code, out, _ = run(capsys, "support", "-w", WEB, "[ID='P'].[filter='M']", "--oracle")
    assert code == 0
    assert "temporal support   1/2 (0.5000)" in out
    assert "oracle             agrees" in out


def test_support_json(capsys):
    code, out, _ = run(capsys, "support", "-w", INTRO, "[ID='C'].[ID='B']", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["temporal_support"]["exact"] == "2/3"
    assert doc["verdicts"][0]["temporal_witness"] is None


def test_support_explain_json_keeps_witnesses(capsys):
    _, out, _ = run(capsys, "support", "-w", WEB, "[ID='P'].[filter='M']",
                    "--format", "json", "--explain")
    s1 = json.loads(out)["verdicts"][0]
    assert s1["total_witness"].endswith("19:45 C -> eco_C3")


def test_workspace_from_environment(capsys, monkeypatch):
    monkeypatch.setenv(WORKSPACE_ENV, INTRO)
    # parser defaults are read when the parser is built
    code, out, _ = run(capsys, "classic", "[ID='C'].[ID='B'].[ID='C']")
    assert (code, out.strip()) == (0, "2/3 (0.6667)")


def test_now_and_kind_flags(capsys):
    code, out, _ = run(capsys, "support", "-w", WEB, "[ID='P'].[filter='M']",
                       "--kind", "re", "--now", "11/29/2007 19:31")
    assert code == 0 and "kind               re" in out
    assert "temporal matchers  0" in out


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "-w", WEB)
    assert code == 0
    assert "8 ECOs" in out and "objects: 3, tuples: 9" in out


def test_encode(capsys, tmp_path):
    (tmp_path / "schemas.txt").write_text("category Page; id ID; attrs keyword\n")
    (tmp_path / "Page.points").write_text(
        "A | keyword=x | 01/01/2020 10:00\nA | keyword=x | 01/01/2020 10:01\n"
        "A | keyword=y | 01/01/2020 10:02\n")
    code, out, _ = run(capsys, "encode", "-w", str(tmp_path), "Page")
    assert code == 0
    assert out.splitlines() == [
        "A | keyword=x | 01/01/2020 10:00 .. 01/01/2020 10:01",
        "A | keyword=y | 01/01/2020 10:02 .. 01/01/2020 10:02"]
    target = tmp_path / "out.ecos"
    assert main(["encode", "-w", str(tmp_path), "Page", "-o", str(target)]) == 0
    assert target.read_text().splitlines() == out.splitlines()


@pytest.mark.parametrize("argv, needle", [
    (["support", "-w", WEB, "[ID='A'])"], "position 8"),
    (["support", "-w", WEB, "[colour='red']"], "colour"),
    (["support", "-w", WEB, "[ID='A']", "--now", "tomorrow"], "tomorrow"),
    (["support", "-w", "/nonexistent", "[ID='A']"], "schemas.txt"),
    (["encode", "-w", WEB, "Nope"], "Nope"),
])
def test_errors_exit_with_status_1(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert err.startswith("tsupport: error:") and needle in err


def test_missing_workspace_argument(capsys, monkeypatch):
    monkeypatch.delenv(WORKSPACE_ENV, raising=False)
    code, _, err = run(capsys, "validate")
    assert code == 1 and WORKSPACE_ENV in err


def test_bad_granularity_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["validate", "-w", WEB, "--granularity", "fortnight"])
    assert info.value.code == 2
