import pytest

from battery import build_cases, run_case


@pytest.fixture(scope="session")
def battery_results():
    """Oracle runs of the full 60-case grid, cached for the whole session."""
    cases = build_cases()
    return [run_case(c) for c in cases]
