import pytest

from pfk import corpus


@pytest.fixture(scope="session")
def c3():
    return corpus.chain(3)


@pytest.fixture(scope="session")
def m3():
    return corpus.diamond_m3()


@pytest.fixture(scope="session")
def sierpinski():
    return corpus.sierpinski()


@pytest.fixture(scope="session")
def b1():
    return corpus.bundle_b1()


@pytest.fixture(scope="session")
def b2():
    return corpus.bundle_b2()


@pytest.fixture(scope="session")
def b3():
    return corpus.bundle_b3()


@pytest.fixture(scope="session")
def b4():
    return corpus.bundle_b4()


@pytest.fixture(scope="session")
def l1():
    return corpus.linloc_l1()
