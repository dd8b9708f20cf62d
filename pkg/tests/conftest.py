import pytest
from hypothesis import HealthCheck, settings

from projfilter import certify as certify_mod

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

AUDIT = {"count": 0, "violations": []}


@pytest.fixture(autouse=True)
def audit_certificates():
    """Every certificate produced during a test must satisfy the parity laws."""
    seen = []
    certify_mod.observers.append(seen.append)
    yield seen
    certify_mod.observers.remove(seen.append)
    bad = [(c.summary(), c.parity_violations()) for c in seen if c.parity_violations()]
    AUDIT["count"] += len(seen)
    AUDIT["violations"].extend(bad)
    assert not bad, f"parity laws violated: {bad[:3]}"


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"certificate audit: {AUDIT['count']} certificates, "
        f"{len(AUDIT['violations'])} parity violations")
    ok = AUDIT["count"] > 0 and not AUDIT["violations"]
    terminalreporter.write_line(
        f"criterion 10 (suite-wide parity audit): {'PASS' if ok else 'FAIL'}")
