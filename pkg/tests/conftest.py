import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """record(key, title, checks): checks are (label, ok, detail); prints one PASS/FAIL line and asserts."""

    def record(key, title, checks):
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{label}: {detail} [{'ok' if good else 'FAIL'}]" for label, good, detail in checks)
        line = f"{key:<4}{'PASS' if ok else 'FAIL'}  {title} | {parts}"
        ACCEPTANCE[key] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        terminalreporter.write_line(ACCEPTANCE[key])
