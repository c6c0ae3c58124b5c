"""Shared fixtures: cached pipeline runs and the acceptance result lines."""

from __future__ import annotations

import pytest

from polartree import Options, analyze_pair, get_fixture

_run_cache: dict = {}


def fixture_run(name: str, **opts):
    """Run the pipeline on a named fixture, memoized across the session."""
    key = (name, tuple(sorted(opts.items())))
    if key not in _run_cache:
        fx = get_fixture(name)
        _run_cache[key] = analyze_pair(fx.f, fx.g, Options(**opts))
    return _run_cache[key]


def pair_run(f: str, g: str, **opts):
    key = (f, g, tuple(sorted(opts.items())))
    if key not in _run_cache:
        _run_cache[key] = analyze_pair(f, g, Options(**opts))
    return _run_cache[key]


@pytest.fixture
def run_fixture():
    return fixture_run


@pytest.fixture
def run_pair():
    return pair_run


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {name}: {status}")
