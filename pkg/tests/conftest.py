"""Shared fixtures and the per-criterion acceptance summary."""

from collections import OrderedDict

import pytest

_CRITERIA = OrderedDict()


class CriterionRecorder:
    def __call__(self, number: int, label: str, passed: bool, detail: str = "") -> bool:
        _CRITERIA.setdefault(number, []).append((label, bool(passed), detail))
        print(f"[criterion {number:2d}] {'PASS' if passed else 'FAIL'}  {label}  {detail}")
        return bool(passed)


@pytest.fixture(scope="session")
def criterion():
    """``criterion(number, label, passed, detail)`` records one sub-check."""
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        ok = all(p for _, p, _ in parts)
        failed = [f"{label} ({detail})" for label, p, detail in parts if not p]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  failing: " + "; ".join(failed)
        tr.write_line(line)
