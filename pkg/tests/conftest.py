import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects ``(criterion, ok, detail)`` entries for the terminal summary."""

    def record(criterion: str, ok: bool, detail: str):
        _ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
        print(f"{criterion}: {'PASS' if ok else 'FAIL'} ({detail})")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE, key=lambda c: int(c.split()[1])):
        parts = _ACCEPTANCE[criterion]
        ok = all(p[0] for p in parts)
        detail = "; ".join(p[1] for p in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
