import pytest
from prometheus_client import REGISTRY

from stratakit.checks.engine import CheckEngine, CheckSkipped, Report, merge_reports


@pytest.fixture
def engine():
    """Fixture to create an engine with one passing and one failing check."""
    e = CheckEngine("sample subject")
    e.add_check("always", lambda: (True, "fine", None))
    e.add_check("never", lambda: (False, "broken", {"witness": 3}))
    return e


def sample(check, result):
    labels = {"check": check, "result": result}
    return REGISTRY.get_sample_value("stratakit_checks_total", labels) or 0.0


def test_run_collects_results(engine):
    """Test that every check yields one result in registration order."""
    report = engine.run()
    assert report.names() == ["always", "never"]
    assert not report.passed
    assert [c.name for c in report.failed()] == ["never"]
    assert report.check("never").details == {"witness": 3}


def test_run_single_check(engine):
    """Test running one named check."""
    report = engine.run(only="always")
    assert report.passed
    assert report.names() == ["always"]
    with pytest.raises(ValueError, match="not found"):
        engine.run(only="missing")


def test_duplicate_check(engine):
    """Test that names are unique per engine."""
    with pytest.raises(ValueError, match="already registered"):
        engine.add_check("always", lambda: (True, "", None))


def test_raising_check_fails():
    """Test that an exception inside a check becomes a failed result."""
    e = CheckEngine("raising")

    def boom():
        raise RuntimeError("no luck")

    e.add_check("boom", boom)
    result = e.run().check("boom")
    assert not result.passed
    assert result.message == "Error executing check: no luck"


def test_unknown_check_in_report(engine):
    """Test lookup of a check that is not in the report."""
    with pytest.raises(ValueError, match="not found in report"):
        engine.run().check("absent")


def test_merge_reports(engine):
    """Test that merged reports prefix names with their subject."""
    other = Report(subject="other")
    merged = merge_reports("both", [engine.run(), other])
    assert merged.names() == ["sample subject.always", "sample subject.never"]
    assert not merged.passed
    plain = merge_reports("both", [engine.run()], prefix=False)
    assert plain.names() == ["always", "never"]


def test_to_dict(engine):
    """Test the serialized form of a report."""
    data = engine.run().to_dict()
    assert data["subject"] == "sample subject"
    assert data["passed"] is False
    assert data["checks"][1]["message"] == "broken"


def test_empty_report_passes():
    """Test that a report without checks passes."""
    assert CheckEngine("empty").run().passed


def test_counter_records_outcomes(engine):
    """Test that check outcomes are counted by name and result."""
    passed_before = sample("always", "passed")
    failed_before = sample("never", "failed")
    engine.run()
    assert sample("always", "passed") == passed_before + 1
    assert sample("never", "failed") == failed_before + 1


def test_skipped_check_is_neither_passed_nor_failed():
    """Test that a skipped check is reported apart from passes and failures."""
    e = CheckEngine("partly checked")
    e.add_check("always", lambda: (True, "fine", None))

    def too_big():
        raise CheckSkipped("search space too large")

    e.add_check("too_big", too_big)
    before = sample("too_big", "skipped")
    report = e.run()
    result = report.check("too_big")
    assert result.skipped
    assert not result.passed
    assert result.message == "Skipped: search space too large"
    assert report.passed
    assert report.failed() == []
    assert [c.name for c in report.skipped()] == ["too_big"]
    assert report.to_dict()["skipped"] == ["too_big"]
    assert sample("too_big", "skipped") == before + 1
