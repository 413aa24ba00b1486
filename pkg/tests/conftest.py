from __future__ import annotations

import pytest

from tcreol import bundled_model, load_model
from tcreol.runtime import init_configuration


def program_of(text: str):
    return load_model(text)


def config_of(text: str, limit: int = 10):
    return init_configuration(load_model(text), limit)


def bundled_config(name: str, limit: int):
    return init_configuration(load_model(bundled_model(name)), limit)


@pytest.fixture
def make_config():
    return config_of


# -- acceptance reporting: one PASS/FAIL line per criterion in the summary

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Recorder ``(ok, detail)`` for a ``test_criterion_<n>_<name>`` test.

    A test that errors before recording is reported as FAIL.
    """
    _, _, rest = request.node.name.partition("test_criterion_")
    number, _, name = rest.partition("_")
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])
    recorded = []

    def record(ok: bool, detail: str) -> None:
        recorded.append(True)
        lines.append((int(number), name.replace("_", " "), ok, detail))

    yield record
    if not recorded:
        lines.append((int(number), name.replace("_", " "), False, "error before a verdict"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number} ({name}): {'PASS' if ok else 'FAIL'} - {detail}")
