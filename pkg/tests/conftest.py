import numpy as np
import pytest
from hypothesis import strategies as st

from fcm4drv import Drv, load_academic_units


@st.composite
def drvs(draw, min_size=1, max_size=40, lo=-1.0, hi=1.0):
    n = draw(st.integers(min_size, max_size))
    values = draw(
        st.lists(
            st.floats(lo, hi, allow_nan=False, allow_infinity=False),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    weights = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    w = np.array(weights)
    return Drv(values, w / w.sum())


def random_drv(rng, size, lo=-1.0, hi=1.0):
    values = rng.uniform(lo, hi, size)
    w = rng.uniform(0.01, 1.0, size)
    return Drv(values, w / w.sum())


@pytest.fixture(scope="session")
def academic():
    return load_academic_units()


# --- acceptance reporting -------------------------------------------------

# criterion number -> [title, {nodeid: passed}]
_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    cases = _ACCEPTANCE.setdefault(number, [title, {}])[1]
    cases[item.nodeid] = cases.get(item.nodeid, True) and not report.failed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, cases = _ACCEPTANCE[number]
        ok = sum(cases.values())
        status = "PASS" if ok == len(cases) else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} ({ok}/{len(cases)} cases)")
