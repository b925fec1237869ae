import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=600)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance gate: criterion(cid, text, ok, detail) -> ok."""

    def record(cid, text, ok, detail=""):
        _ACCEPTANCE.append((cid, text, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, text, ok, detail in sorted(_ACCEPTANCE, key=lambda r: (int(r[0].split(".")[0]), r[0])):
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid:>5}  {text}" + (f"  ({detail})" if detail else ""))
    n_ok = sum(r[2] for r in _ACCEPTANCE)
    tr.write_line(f"{n_ok}/{len(_ACCEPTANCE)} acceptance gates passed")
