"""Shared fixtures: small configurations that keep unit tests fast while
exercising every phase of the simulation."""

import pytest

from migsim.domain import ScenarioConfig


@pytest.fixture
def default_config() -> ScenarioConfig:
    return ScenarioConfig()


@pytest.fixture
def tiny_config() -> ScenarioConfig:
    """Cheap but complete: multiple releases, both schedule kinds reachable."""
    return ScenarioConfig(releases=6, runs=2, incremental_schedule=frozenset({3, 5}))


# One line per acceptance criterion, echoed after the test report so the
# verdicts survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def record_verdict(num: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE_LINES.append(f"CRITERION {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
