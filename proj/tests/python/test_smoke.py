import json
import os
import pathlib
import urllib.request

import pytest

import pathtrace

DEMO = pathlib.Path(os.environ.get("PATHTRACE_DEMO_DIR", pathlib.Path(__file__).resolve().parents[2] / "demo"))


@pytest.fixture
def app():
    return pathtrace.App(str(DEMO / "app.json"))


def test_parse_template_keeps_text():
    text = '<div>\n  <ui:inputText id="n" value="#{u.n}"/>\n</div>'
    tags, serialized = pathtrace.parse_template(text, "t.xhtml")
    assert serialized == text
    assert tags[0]["tag"] == "inputText"
    assert tags[0]["line"] == 2
    with pytest.raises(pathtrace.TemplateError):
        pathtrace.parse_template("<ui:panel>", "t.xhtml")


def test_pointcuts():
    setters = "execution(* javax.faces.component.html.*->set*(..))"
    assert pathtrace.normalize_pointcut("execution( *  javax.faces.component.html.* -> set*( .. ) )") == setters
    jp = pathtrace.JoinPoint("javax.faces.component.html.HtmlInputText", "setValue", 1)
    assert pathtrace.pointcut_matches(setters, jp)
    assert not pathtrace.pointcut_matches(setters, pathtrace.JoinPoint("org.richfaces.component.html.HtmlCalendar", "setValue", 1))
    with pytest.raises(pathtrace.PointcutError):
        pathtrace.normalize_pointcut("execution(* a.B->c(")


def test_base64url():
    for raw in [b"", b"f", b"\xff\xfe", bytes(range(256))]:
        enc = pathtrace.base64url_encode(raw)
        assert "=" not in enc
        assert pathtrace.base64url_decode(enc) == raw
    with pytest.raises(pathtrace.MalformedPayload):
        pathtrace.base64url_decode("a")


def test_get_records_and_strip(app):
    on = app.request("GET", "/pages/form")
    off = app.request("GET", "/pages/form", query=[("__prov", "off")])
    assert on.status == 200
    assert on.phases == [1, 6]
    assert on.header("X-Prov") == "on"
    assert pathtrace.strip(on.body) == off.body
    records, summary, errors = pathtrace.decode_page(on.body)
    assert not errors
    assert json.loads(summary)["path_label"] == "GET-initial"
    assert [json.loads(r)["component_id"] for r in records] == ["name", "age", "submit", "msgs"]


def test_scenario_paths(app):
    first = app.request("GET", "/pages/form")
    sid = first.session_id
    bad = app.request("POST", "/pages/form", [("name", ""), ("submit", "Save")], session=sid)
    assert bad.phases == [1, 2, 3, 6]
    good = app.request("POST", "/pages/form", [("name", "Ada"), ("age", "3"), ("submit", "Save")], session=sid)
    assert good.phases == [1, 2, 3, 4, 5, 6]
    assert good.view_id == "done.xhtml"
    special = app.request("POST", "/pages/done", [("render", "c"), ("param2", "1")], ajax=True, session=sid)
    assert special.path_label == "AJAX-special"
    report = json.loads(pathtrace.inspect(special.body, "c")[0])
    units = [step["unit"] for step in report["server_path"]]
    assert "demo.ajax.SpecialAjaxHandler" in units
    assert "demo.ajax.DefaultAjaxHandler" not in units


def test_inspect_and_list(app):
    page = app.request("GET", "/pages/calendar").body
    rows = pathtrace.list_components(page)
    assert rows[0] == ("c", "ui:calendar", "pages/calendar.xhtml:4")
    report = json.loads(pathtrace.inspect(page, "tag=ui:calendar")[0])
    assert report["locations"][0] == "pages/calendar.xhtml:4"
    with pytest.raises(pathtrace.InspectError):
        pathtrace.inspect(page, "nope")


def test_no_prov_and_errors():
    quiet = pathtrace.App(str(DEMO / "app.json"), no_prov=True)
    r = quiet.request("GET", "/pages/form", query=[("__prov", "on")])
    assert r.header("X-Prov") == "off"
    assert "prov-" not in r.body
    assert quiet.request("GET", "/pages/absent").status == 404
    assert quiet.request("POST", "/pages/calendar", [("param2", "1")], ajax=True).status == 400


def test_http(app):
    port = app.start()
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{port}/pages/done") as res:
            assert res.headers["X-Prov"] == "on"
            assert res.headers["Set-Cookie"].startswith("SID=")
            body = res.read().decode()
        assert [row[0] for row in pathtrace.list_components(body)] == ["summary", "who", "c"]
        assert app.reload() == (11, 11)
    finally:
        app.stop()
