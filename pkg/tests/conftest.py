from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (title, passed, seconds, limit); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, float, float | None]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, secs, limit = ACCEPTANCE[n]
        bound = f" (limit {limit:g} s)" if limit is not None else ""
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}  {secs:.2f} s{bound}")
