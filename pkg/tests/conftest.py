import json
from importlib import resources

import pytest

from flagcomb.rootdata import load_datum


def bundled_spec(name: str) -> dict:
    return json.loads((resources.files("flagcomb") / "data" / f"{name}.json").read_text())


@pytest.fixture(scope="session")
def datum():
    return load_datum


# criterion number -> (passed, title, seconds, budget); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str, float, float | None]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, title, secs, budget = ACCEPTANCE[num]
        limit = f" (budget {budget:g} s)" if budget else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {num}. {title}: {secs:.2f} s{limit}")
