import pytest

_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance outcome: criterion(label, ok, detail)."""

    def record(label, ok, detail=""):
        _ACCEPTANCE.setdefault(label, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s[1:].split()[0])):
        rows = _ACCEPTANCE[label]
        status = "PASS" if all(ok for ok, _ in rows) else "FAIL"
        details = "; ".join(d for _, d in rows if d)
        terminalreporter.write_line(f"[{status}] {label}: {details}")
