import json

import jsonschema
import numpy as np
import pytest

from kinkcheck import analyze, run_suite
from kinkcheck.report import REPORT_SCHEMA, SUITE_SCHEMA, AnalysisReport, validate

from conftest import load


def test_report_validates_and_round_trips(ex28):
    rep = analyze(ex28, np.zeros(3))
    data = json.loads(rep.to_json())
    validate(data, REPORT_SCHEMA)
    back = AnalysisReport.from_dict(data)
    assert back == rep
    assert back.to_json(timing=False) == rep.to_json(timing=False)


def test_ex28_report_content(ex28):
    d = analyze(ex28, np.zeros(3)).to_dict()
    assert d["switching"]["alpha"] == [1] and d["switching"]["activeIneq"] == [1, 2]
    assert d["cq"]["likq"]["holds"] is False and d["cq"]["idkq"]["holds"] is True
    assert d["cq"]["idkq"]["witness"]["d"] == [0.0, 0.0, -1.0]
    assert d["stationarity"]["kink"]["holds"] is False
    assert "certificate" in d["stationarity"]["kink"]
    assert d["secondOrder"]["classification"] == "not-applicable"


def test_schema_rejects_bad_reports(ex28):
    d = analyze(ex28, np.zeros(3)).to_dict()
    d["secondOrder"]["classification"] = "maybe"
    with pytest.raises(jsonschema.ValidationError):
        validate(d)
    d = analyze(ex28, np.zeros(3)).to_dict()
    del d["cq"]["mpccMfcq"]
    with pytest.raises(jsonschema.ValidationError):
        validate(d)


def test_given_multipliers_are_verified():
    from kinkcheck import MultiplierSet
    p = load("smooth_qp.anf")
    d = analyze(p, [0.0, 1.0], MultiplierSet([], [2.0], [])).to_dict()
    assert d["stationarity"]["kink"]["holds"] and d["stationarity"]["s"]["holds"]
    assert d["secondOrder"]["classification"] == "sufficient-holds"
    d = analyze(p, [0.0, 1.0], MultiplierSet([], [1.0], [])).to_dict()
    assert d["stationarity"]["kink"]["failed"] == ["gradient"]
    assert d["secondOrder"]["classification"] == "not-applicable"


def test_suite_report(ex28):
    data = run_suite(ex28, np.zeros(3), seed=1, samples=3)
    validate(data, SUITE_SCHEMA)
    assert data["violations"] == []
    assert data["summary"]["idkq_slack_oneway"]["converseFailures"] >= 1
