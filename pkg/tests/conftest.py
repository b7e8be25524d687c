import pytest

from olivelab import kgroup


@pytest.fixture(scope="session")
def p_toy():
    return kgroup.toy_params()


@pytest.fixture(scope="session")
def p_full():
    return kgroup.full_params()


@pytest.fixture(scope="session")
def p2_full():
    return kgroup.make_K2(kgroup.full_params())


@pytest.fixture(scope="session")
def p2_toy():
    return kgroup.make_K2(kgroup.toy_params())
