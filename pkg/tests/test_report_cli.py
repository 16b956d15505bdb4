import json
import subprocess
import sys

import jsonschema
import pytest

from quasiform import catalog
from quasiform.cli import CATALOG_LIST_SCHEMA, catalog_listing, main
from quasiform.classify import ClassifyConfig
from quasiform.report import (
    REPORT_SCHEMA,
    classify_metric,
    parse_text_labels,
    render_json,
    render_text,
    report_to_dict,
    sample_points,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_points_deterministic_and_in_domain():
    m = catalog.get("sl2r").metric
    a = sample_points(m, 30, 42)
    assert a == sample_points(m, 30, 42)
    assert a != sample_points(m, 30, 43)
    for p in a:
        assert all(lo <= x <= hi for x, (lo, hi) in zip(p, m.domain))
    with pytest.raises(ValueError):
        sample_points(m, 0, 1)


def test_json_schema_and_text_agree():
    m = catalog.get("nil").metric
    rep = classify_metric(m, ClassifyConfig(), samples=6)
    doc = json.loads(render_json(rep, m))
    jsonschema.validate(doc, REPORT_SCHEMA)
    text = render_text(rep, m)
    agg, per_point = parse_text_labels(text)
    assert agg == doc["aggregate"]["labels"]
    assert per_point == [p["labels"] for p in doc["points"]]
    for p in doc["points"]:
        for k, v in p["residuals"].items():
            assert f"res      {k} = {v!r}" in text


def test_explicit_points():
    m = catalog.get("sol").metric
    rep = classify_metric(m, points=[(0, 0, 0), (0.1, 0.2, 0.3)])
    assert [p.point for p in rep.points] == [(0.0, 0.0, 0.0), (0.1, 0.2, 0.3)]
    with pytest.raises(ValueError):
        classify_metric(m, points=[(0, 0)])


def test_classify_sol_json(capsys):
    code, out, _ = run(capsys, "classify", "--catalog", "sol", "--samples", "50", "--seed", "42", "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    agg = doc["aggregate"]
    assert {"quasi-Einstein", "QCC", "Deszcz"} <= set(agg["labels"])
    assert agg["constant_type"] == pytest.approx(-1.0, abs=1e-7)
    assert all(p["qcc"]["q"] == 1 for p in doc["points"])
    assert doc["points"][0]["qcc"]["Kperp"] == pytest.approx(1.0)
    assert doc["points"][0]["qcc"]["Kbar"] == pytest.approx(-1.0)


def test_classify_e3_text(capsys):
    code, out, _ = run(capsys, "classify", "--catalog", "e3", "--samples", "3")
    assert code == 0
    agg, _ = parse_text_labels(out)
    assert {"CC", "flat"} <= set(agg)


def test_bit_identical_json(capsys):
    outs = [run(capsys, "classify", "--catalog", "warped", "--samples", "10", "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_bad_file_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.metric"
    bad.write_text("dim = 2\ncoords = x, y\ng[1][1] = 1+*2\n")
    code, _, err = run(capsys, "classify", "--file", str(bad))
    assert code == 2
    assert "line 3" in err and "column" in err
    code, _, _ = run(capsys, "classify", "--file", str(tmp_path / "missing.metric"))
    assert code == 2


def test_numerical_failure_exit_3(tmp_path, capsys):
    f = tmp_path / "neg.metric"
    f.write_text("dim = 2\ncoords = x, y\ndomain x = [-1, -0.5]\ng[1][1] = sqrt(x)\ng[2][2] = 1\n")
    code, _, err = run(capsys, "classify", "--file", str(f), "--samples", "2")
    assert code == 3 and "sqrt" in err
    f.write_text("dim = 2\ncoords = x, y\ng[1][1] = x\ng[2][2] = 1\n")
    code, _, _ = run(capsys, "classify", "--file", str(f), "--point=-0.5,0")
    assert code == 3


def test_user_file_uses_looser_label_tolerance(tmp_path, capsys):
    path = tmp_path / "sol.metric"
    run(capsys, "catalog", "export", "sol", "-o", str(path))
    code, out, _ = run(capsys, "classify", "--file", str(path), "--samples", "3", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["config"]["tol_label"] == 1e-5
    code, out, _ = run(capsys, "classify", "--file", str(path), "--samples", "3", "--json", "--tol-label", "1e-9")
    assert json.loads(out)["config"]["tol_label"] == 1e-9


def test_export_round_trip_reproduces_report(tmp_path, capsys):
    path = tmp_path / "sol.metric"
    assert run(capsys, "catalog", "export", "sol", "-o", str(path))[0] == 0
    args = ["--samples", "10", "--json", "--tol-label", "1e-8"]
    a = json.loads(run(capsys, "classify", "--catalog", "sol", *args)[1])
    b = json.loads(run(capsys, "classify", "--file", str(path), *args)[1])
    assert a["points"] == b["points"] and a["aggregate"] == b["aggregate"]


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    for name in catalog.names():
        assert name in out
    assert "provenance" in out
    code, out, _ = run(capsys, "catalog", "list", "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, CATALOG_LIST_SCHEMA)
    assert len(doc) >= 12 and doc == catalog_listing()
    code, out, _ = run(capsys, "catalog", "list", "--schema")
    assert json.loads(out) == CATALOG_LIST_SCHEMA


def test_catalog_export_stdout_and_unknown(capsys):
    code, out, _ = run(capsys, "catalog", "export", "nil")
    assert code == 0 and "g[3][2] = -x" in out
    code, _, err = run(capsys, "catalog", "export", "klein")
    assert code == 2 and "klein" in err


def test_verify_commands(capsys):
    code, out, _ = run(capsys, "verify", "PROP", "--catalog", "sol", "--samples", "10")
    assert code == 0 and out.startswith("PROP: PASS")
    code, out, _ = run(capsys, "verify", "TK", "--catalog", "s2xh2", "--samples", "10")
    assert code == 0 and out.startswith("TK: PASS")
    code, out, _ = run(capsys, "verify", "T3", "--catalog", "generic4", "--samples", "5")
    assert code == 0 and out.startswith("T3: NOT-APPLICABLE")
    code, out, _ = run(capsys, "verify", "eq1617", "--catalog", "sol", "--samples", "5", "--json")
    assert json.loads(out)["status"] == "PASS"
    code, _, err = run(capsys, "verify", "T9", "--catalog", "sol")
    assert code == 2 and "unknown check" in err


def test_verify_user_file(tmp_path, capsys):
    path = tmp_path / "nil.metric"
    run(capsys, "catalog", "export", "nil", "-o", str(path))
    code, out, _ = run(capsys, "verify", "T2", "--file", str(path), "--samples", "5")
    assert code == 0 and "PASS" in out


def test_argument_validation(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--catalog", "sol", "--samples", "0"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["classify", "--catalog", "sol", "--tol-label", "-1"])
    with pytest.raises(SystemExit):
        main(["classify"])
    with pytest.raises(SystemExit):
        main(["classify", "--catalog", "sol", "--point", "1,a"])
    capsys.readouterr()


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "quasiform", "classify", "--catalog", "e3", "--samples", "2", "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "flat" in json.loads(proc.stdout)["aggregate"]["labels"]


def test_report_dict_config_block():
    m = catalog.get("e3").metric
    d = report_to_dict(classify_metric(m, ClassifyConfig(seed=7), samples=2, source="x"), m)
    assert d["config"]["seed"] == 7 and d["config"]["samples"] == 2
    assert d["metric"]["source"] == "x"
