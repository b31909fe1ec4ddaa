"""Shared pytest configuration"""
import pytest


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run table reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long continuations and table reproductions")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def kepler():
    from sym_orbits.dynamics.crtbp import CRTBPModel
    return CRTBPModel.rotating_kepler()
