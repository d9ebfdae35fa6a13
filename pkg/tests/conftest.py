import os

import hypothesis
import pytest

from chaoslab import tm

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("dev", max_examples=50, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture(scope="session")
def machines():
    return {name: tm.load_machine(f"builtin:{name}") for name in tm.builtin_machines()}


# -- one summary line per acceptance criterion ------------------------------

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    name = item.name
    if not name.startswith("test_criterion_"):
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        doc = (item.function.__doc__ or name).strip().splitlines()[0]
        _criteria[name] = ("PASS" if rep.passed else "FAIL", doc)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        verdict, doc = _criteria[name]
        number = int(name.split("_")[2])
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {doc}")
