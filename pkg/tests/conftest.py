import numpy as np
import pytest

from spr3 import SwimmerGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def geom():
    return SwimmerGeometry(radius=0.1, arm_length=1.0, viscosity=1.0)


@pytest.fixture
def slender():
    return SwimmerGeometry(radius=0.01, arm_length=1.0, viscosity=1.0)


def random_states(rng, n, ratio_range=(0.005, 0.2), spread=0.5):
    """Random admissible (geometry, xi, theta) triples with dimensional arm lengths."""
    out = []
    for _ in range(n):
        xi0 = 10 ** rng.uniform(-1, 1)
        a = rng.uniform(*ratio_range) * xi0
        geom = SwimmerGeometry(a, xi0, viscosity=10 ** rng.uniform(-1, 1))
        xi = rng.uniform(-spread, spread, 3) * xi0
        out.append((geom, xi, rng.uniform(-np.pi, np.pi)))
    return out


CRITERIA = {
    1: "coefficient reproduction",
    2: "structure reproduction",
    3: "rotational equivariance",
    4: "optimal stroke round trip",
    5: "stroke-plane properties",
    6: "small-ball asymmetry",
    7: "mobility consistency",
    8: "dynamics quality",
    9: "CLI determinism",
}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None or (report.when != "call" and report.passed):
        return
    failed = _outcomes.setdefault(crit, {"n": 0, "failed": []})
    if report.when == "call":
        failed["n"] += 1
    if report.failed:
        failed["failed"].append(report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_outcomes):
        res = _outcomes[crit]
        status = "FAIL" if res["failed"] else "PASS"
        line = f"criterion {crit} ({CRITERIA[crit]}): {status} [{res['n']} checks]"
        if res["failed"]:
            line += " failing: " + ", ".join(res["failed"])
        terminalreporter.write_line(line)
