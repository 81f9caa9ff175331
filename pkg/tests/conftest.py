import json
import pathlib

import pytest

GOLDEN = json.loads(pathlib.Path(__file__).with_name("golden.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


def rel_err(got, want):
    return abs(got - want) / max(abs(want), 1e-300)


# acceptance criteria report: one line per criterion, printed at the end of the run
ACCEPTANCE = {}


def record(number, title, checks):
    """Store [(label, ok, detail)] for a criterion and return whether all passed."""
    ACCEPTANCE.setdefault(number, (title, []))[1].extend(checks)
    return all(ok for _, ok, _ in checks)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, checks = ACCEPTANCE[number]
        ok = all(c[1] for c in checks)
        failed = [f"{label}: {detail}" for label, good, detail in checks if not good]
        note = "; ".join(failed) if failed else "; ".join(f"{label}: {detail}" for label, _, detail in checks[:3])
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  [{note}]")
