import logging

import pytest

from cocycle_lab import selftest
from cocycle_lab.selftest import SUITES, SuiteResult, run_selftest


@pytest.mark.parametrize(
    "name",
    ["switchback", "les", "crossed-hom", "regularization", "extensions", "averaging"],
)
def test_suite_passes(name: str) -> None:
    (result,) = run_selftest(seed=3, names=[name])
    assert result.name == name
    assert result.passed, result.detail


def test_unknown_names_are_skipped() -> None:
    assert run_selftest(names=["nonsense"]) == []


def test_failures_are_reported(monkeypatch, caplog) -> None:
    def broken(rng) -> str:
        raise AssertionError("d o d != 0")

    monkeypatch.setitem(SUITES, "coboundary", broken)
    with caplog.at_level(logging.ERROR):
        results = run_selftest(names=["coboundary", "switchback"])
    assert results[0] == SuiteResult("coboundary", False, "d o d != 0")
    assert results[1].passed
    assert "Suite coboundary failed: d o d != 0" in caplog.text


def test_suites_are_seeded(mocker) -> None:
    spy = mocker.spy(selftest.np.random, "default_rng")
    run_selftest(seed=11, names=["switchback"])
    spy.assert_called_once_with(11)


def test_associativity_covers_five_hundred_cochains() -> None:
    (result,) = run_selftest(seed=5, names=["extensions"])
    assert result.passed
    assert result.detail == "500 random 2-cochains"
