import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from acceptance_log import RESULTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        status, title, elapsed, note = RESULTS[k]
        line = f"{status} criterion {k:>2}: {title} ({elapsed:.2f} s)"
        if note:
            line += f" [{note}]"
        terminalreporter.write_line(line)
