import pytest

import subfreq as sf


@pytest.fixture(scope="session")
def h1():
    return sf.heisenberg(1)


@pytest.fixture(scope="session")
def h2():
    return sf.heisenberg(2)


@pytest.fixture(scope="session")
def rule_h1(h1):
    return sf.build_sphere_rule(h1, 32)


@pytest.fixture(scope="session")
def rule_h2(h2):
    return sf.build_sphere_rule(h2, 32)


@pytest.fixture(scope="session")
def ba112():
    return sf.BaouendiSpec(1, 1, 2)


@pytest.fixture(scope="session")
def ba211():
    return sf.BaouendiSpec(2, 1, 1)


@pytest.fixture(scope="session")
def rule_ba112(ba112):
    return sf.build_sphere_rule(ba112, 32)


@pytest.fixture(scope="session")
def rule_ba211(ba211):
    return sf.build_sphere_rule(ba211, 32)
