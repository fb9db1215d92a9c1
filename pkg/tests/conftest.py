import contextlib

import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


class _Criterion:
    def __init__(self, name: str):
        self.name = name
        self.detail = ""

    def note(self, text: str) -> None:
        self.detail = text


@contextlib.contextmanager
def _record(name: str):
    c = _Criterion(name)
    ok = False
    try:
        yield c
        ok = True
    finally:
        _ACCEPTANCE.append((name, ok, c.detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {c.detail}")


@pytest.fixture
def criterion():
    """Context manager that records one acceptance line (PASS/FAIL plus detail)."""
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
