from __future__ import annotations

import pytest

from sunadakit.pipeline import FixtureBundle, fixture_names


@pytest.fixture(scope="session")
def bundles() -> dict[str, FixtureBundle]:
    return {name: FixtureBundle.bundled(name) for name in fixture_names()}


@pytest.fixture(scope="session")
def k11(bundles) -> FixtureBundle:
    return bundles["k11n116"]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
