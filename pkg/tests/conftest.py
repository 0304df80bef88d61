from __future__ import annotations

import pytest

_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` lines for the acceptance summary under the test's criterion label."""
    label = request.node.get_closest_marker("criterion").args[0]

    def record(passed: bool, detail: str):
        _ACCEPTANCE.setdefault(label, []).append((bool(passed), detail))
        return passed

    return record


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: (int(s.split()[0].rstrip("ab")), s)):
        checks = _ACCEPTANCE[label]
        ok = all(p for p, _ in checks)
        detail = "; ".join(d for _, d in checks)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}")
