import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(
            f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")
