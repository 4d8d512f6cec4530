import csv
import io
import json
import math

import pytest

from mehlerkit import verify
from mehlerkit.verify import ANCHORS, CSV_HEADER, CheckRecord, Tolerances, VerificationReport


def test_anchor_registry_is_content_named():
    assert ANCHORS
    for name, description in ANCHORS.items():
        assert name == name.lower() and " " not in name
        assert isinstance(description, str) and description


def test_check_record_compare():
    ok = CheckRecord.compare("s", "s.a", "semigroup", {}, 1.0 + 1e-12, 1.0, 1e-10)
    assert ok.passed and ok.rel_err == pytest.approx(1e-12, rel=1e-3)
    # absolute error below the zero-rhs threshold
    zero = CheckRecord.compare("s", "s.b", "semigroup", {}, 3e-7, 0.0, 1e-6)
    assert zero.passed and zero.rel_err == pytest.approx(3e-7)
    bad = CheckRecord.compare("s", "s.c", "semigroup", {}, math.nan, 1.0, 1.0)
    assert not bad.passed and bad.rel_err == math.inf
    assert bad.to_dict()["rel_err"] == "inf"


def test_tolerances_validation_and_override():
    with pytest.raises(ValueError):
        Tolerances(identity=0.0)
    t = Tolerances().with_primary("homogeneity", 1e-3)
    assert t.homogeneity == 1e-3 and t.identity == Tolerances().identity
    every = Tolerances().with_primary("all", 1e-2)
    assert every.identity == every.limit_gap == 1e-2


def test_recorder_rejects_unknown_anchor():
    rec = verify._Recorder("x", 1)
    with pytest.raises(KeyError):
        rec.compare("a", "no-such-anchor", {}, 1.0, 1.0, 1.0)


def test_recorder_turns_errors_into_failures():
    rec = verify._Recorder("x", 1)

    def boom():
        raise ArithmeticError("no")

    record = rec.attempt("a", "semigroup", {"p": 1}, boom, 1.0)
    assert not record.passed and "ArithmeticError" in record.inputs["error"]


def test_report_formats():
    report = verify.suite_homogeneity()
    assert report.overall_pass and report.suites["homogeneity"]["n_checks"] == 12
    doc = json.loads(report.to_json())
    assert set(doc) == {"report", "timing"}
    assert doc["report"]["overall_pass"] is True
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0] == CSV_HEADER and len(rows) == 13
    plain = report.to_plain()
    assert "[homogeneity] 12/12 passed" in plain and plain.rstrip().endswith("PASS")


def test_report_is_deterministic_for_a_seed():
    a = verify.suite_identities(samples=5, seed=7).deterministic_dict()
    b = verify.suite_identities(samples=5, seed=7).deterministic_dict()
    c = verify.suite_identities(samples=5, seed=8).deterministic_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert json.dumps(a, sort_keys=True) != json.dumps(c, sort_keys=True)


def test_merge_combines_suites():
    a = verify.suite_homogeneity()
    b = verify.suite_limit()
    merged = a.merge(b)
    assert set(merged.suites) == {"homogeneity", "limit"}
    assert len(merged.records) == len(a.records) + len(b.records)
    ids = [r.check_id for r in merged.records]
    assert ids == sorted(ids)


def test_tolerance_changes_verdicts():
    tight = Tolerances().with_primary("homogeneity", 1e-30)
    assert not verify.suite_homogeneity(tol=tight).overall_pass


def test_run_suite_dispatch():
    assert verify.run_suite("limit").suites["limit"]["passed"]
    with pytest.raises(KeyError):
        verify.run_suite("nope")


def test_identities_draw_counts():
    report = verify.suite_identities(samples=50)
    assert report.overall_pass
    counts = {}
    for r in report.records:
        counts[r.anchor] = counts.get(r.anchor, 0) + 1
    for anchor in ("gegenbauer-integral", "kummer-transformation", "bateman-integral", "onef0-reduction",
                   "legendre-duplication", "bochner-sphere-integral"):
        assert counts[anchor] >= 50


def test_adjudication_reports_a_candidate_constant():
    adj = verify.adjudicate_constant()
    assert adj["matched_constant"] in {"thm_gen", "meh_Cmk"}
    assert adj["resolved"] and math.isfinite(adj["ratio"])


def test_empty_report_passes_vacuously():
    assert VerificationReport().overall_pass
