import os

import pytest
from hypothesis import HealthCheck, settings

from nsga2_approx import _backend

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

needs_kernel = pytest.mark.skipif(not _backend.compiled_available(), reason="compiled kernel not built")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks")
    config.addinivalue_line("markers", "acceptance: acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
