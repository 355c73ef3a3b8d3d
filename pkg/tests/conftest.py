"""
Shared pytest configuration.

Statistical acceptance checks are marked `slow`; deselect them with
`pytest -m "not slow"`.
"""

import pytest

from bandsel.montecarlo import study_context


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo acceptance checks that take minutes")


@pytest.fixture(autouse=True)
def _fresh_study_context():
    study_context.cache_clear()
    yield
    study_context.cache_clear()
