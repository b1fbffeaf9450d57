import pytest

from purex.bench import checks


@pytest.mark.parametrize("suite", checks.SUITE_NAMES)
def test_suite_passes(suite):
    results = checks.run_suite(suite)
    failed = [r.line() for r in results if not r.passed]
    assert not failed, failed


def test_metrics_suite_includes_oracle_equivalence():
    names = [r.name for r in checks.run_suite("metrics")]
    assert "tv_oracle" in names


def test_confidence_suite_includes_consistency_sweep():
    res = {r.name: r for r in checks.run_suite("confidence")}
    assert res["calculus_consistency"].passed


def test_unknown_suite_raises():
    with pytest.raises(KeyError):
        checks.run_suite("nosuch")
