import pytest

from quasiform import catalog
from quasiform import classify as cl
from quasiform import theorems as th
from quasiform.report import classify_metric


@pytest.mark.parametrize("check_id", list(th.CHECKS))
def test_every_check_passes_on_its_catalog_subset(check_id):
    res = th.verify(check_id, samples=20)
    assert res.status == th.PASS, th.render_result(res)


@pytest.mark.parametrize("check_id", list(th.CHECKS))
def test_no_check_is_vacuous_over_the_catalog(check_id):
    res = th.verify(check_id, samples=5)
    for part in res.parts:
        assert part.premise_points > 0, part.id


def test_equivalences_split_into_two_directions():
    for c in th.CHECKS.values():
        if c.direction == "<=>":
            assert [p.direction for p in c.parts] == ["=>", "<="]
            assert c.parts[0].id.endswith("=>") and c.parts[1].id.endswith("<=")
        else:
            assert len(c.parts) == 1


def test_examples():
    assert th.verify("PROP", ["sol"]).worst_residual <= 1e-8
    assert th.verify("TK", ["s2xh2"]).status == th.PASS
    assert th.verify("T3", ["generic4"]).status == th.NA
    assert th.verify("TF", ["generic4"]).status == th.NA
    assert th.verify("TE", ["s3", "h3", "e3", "sol", "nil"]).status == th.PASS
    assert th.verify("LEMMA", ["sol", "nil", "s2xh2", "warped4"]).worst_residual <= 1e-8


def _fake_report(name, labels, n=3):
    """A one-point report with hand-set labels, to exercise the FAIL path."""
    base = th.catalog_report(name, cl.ClassifyConfig(), 5).points[0]
    from dataclasses import replace

    pt = replace(base, labels=tuple(sorted(labels)))
    return cl.aggregate([pt], metric_name=f"{name}-tampered")


def test_fail_reports_witness():
    rep = _fake_report("nil", {"quasi-Einstein", "Deszcz"})  # QCC removed
    res = th.run_check(th.get_check("T2"), [(rep, None)])
    assert res.status == th.FAIL
    w = res.witnesses[0]
    assert w["metric"] == "nil-tampered" and len(w["point"]) == 3
    assert "=>" in w["implication"]
    assert res.parts[1].status == th.NA


def test_multiplicity_flag_excludes_metric():
    a = th.catalog_report("sol", cl.ClassifyConfig(), 5).points[0]
    b = th.catalog_report("s3", cl.ClassifyConfig(), 5).points[0]
    rep = cl.aggregate([a, b], metric_name="mixed")
    assert "non-constant multiplicity" in rep.flags
    assert not th.get_check("TF").applies_to(rep)
    assert th.get_check("T2").applies_to(rep)


def test_user_report_only():
    m = catalog.get("sol").metric
    rep = classify_metric(m, samples=4)
    res = th.verify("T3", extra=[rep])
    assert res.metrics == ["sol"] and res.status == th.PASS


def test_th_uses_catalog_ground_truth_only():
    rep = classify_metric(catalog.get("s2xh2").metric, samples=3)
    assert th.verify("TH", extra=[rep]).status == th.NA


def test_unknown_check():
    with pytest.raises(KeyError):
        th.get_check("T0")


def test_render_mentions_instance_nature():
    text = th.render_result(th.verify("TG", ["sol"], samples=3))
    assert th.HEADER in text
