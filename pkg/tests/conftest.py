import sys
from pathlib import Path

# tests import sibling test modules (shared oracles) when run from anywhere
sys.path.insert(0, str(Path(__file__).parent))

from _acceptance_report import ACCEPTANCE_LINES  # noqa: E402


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
