from __future__ import annotations

from hypothesis import HealthCheck, settings

from acceptance_log import RESULTS

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def _order(label: str):
    head = label.rstrip("*")
    return (int(head), label)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(RESULTS, key=_order):
        verdict, title = RESULTS[label]
        terminalreporter.write_line(f"criterion {label}: {verdict} - {title}")
