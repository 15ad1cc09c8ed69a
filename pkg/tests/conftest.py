import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_addoption(parser):
    parser.addoption("--paper-scale", action="store_true", default=False,
                     help="also rerun the slope criteria at full paper scale (minutes)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--paper-scale"):
        return
    skip = pytest.mark.skip(reason="needs --paper-scale")
    for item in items:
        if "paper" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion and assert on it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def _verdict(label: str, passed: bool, detail: str = "") -> None:
        line = f"{label}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
        lines.append(line)
        print(line)
        assert passed, line

    return _verdict


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
