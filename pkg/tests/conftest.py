"""Shared fixtures and the per-criterion acceptance summary."""
from collections import OrderedDict

import pytest

_CRITERIA = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion number n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, label = m.args
            _CRITERIA.setdefault(n, {"label": label, "outcomes": []})


def pytest_runtest_makereport(item, call):
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        ok = call.excinfo is None
        _CRITERIA[m.args[0]]["outcomes"].append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        c = _CRITERIA[n]
        if not c["outcomes"]:
            status = "NOT RUN"
        else:
            status = "PASS" if all(ok for _, ok in c["outcomes"]) else "FAIL"
        failed = [name for name, ok in c["outcomes"] if not ok]
        extra = f" (failed: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n:>2}: {status:<7} {c['label']}{extra}")


@pytest.fixture(scope="session")
def random_suite():
    """1000 random finite-level machines and their cycle results (seed 0)."""
    from qotto.cycle import run_otto
    from qotto.explore import random_machines

    out = []
    for spec_h, spec_c, T_h, T_c in random_machines(1000, seed=0):
        out.append(run_otto(spec_h, spec_c, T_h, T_c))
    return out
