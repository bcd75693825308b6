import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# --- acceptance summary -------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, title: str, ok: bool, note: str = ""):
        ACCEPTANCE[number] = ("PASS" if ok else "FAIL", f"{title}{' - ' + note if note else ''}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        verdict, text = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {text}")
