from __future__ import annotations

import pytest

from hopforders.instances import (build_composite_instance, build_gl_instance, build_heisenberg_gl_example,
                                  build_s4_instance, build_sl_instance, build_sp_instance)


@pytest.fixture(scope="session")
def sl21():
    return build_sl_instance(2, 1)


@pytest.fixture(scope="session")
def sl31():
    return build_sl_instance(3, 1)


@pytest.fixture(scope="session")
def gl21():
    return build_gl_instance(2, 1)


@pytest.fixture(scope="session")
def sp31():
    return build_sp_instance(3, 1)


@pytest.fixture(scope="session")
def s4():
    return build_s4_instance()


@pytest.fixture(scope="session")
def heis21():
    return build_heisenberg_gl_example(2, 1)


@pytest.fixture(scope="session")
def composite211():
    return build_composite_instance(2, (1, 1))


# ---- acceptance reporting: one line per criterion

_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = "test_acceptance.py::test_criterion_"
    if marker not in report.nodeid:
        return
    # parametrized cases of one criterion share a single line
    name = report.nodeid.split("::")[-1][len("test_"):].split("[")[0]
    prev = _CRITERIA.get(name, "PASS")
    _CRITERIA[name] = "PASS" if report.passed and prev == "PASS" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        terminalreporter.write_line(f"{_CRITERIA[name]}  {name}")
