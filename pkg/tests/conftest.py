import pytest

from lpcckit.statesets import build_named_set


@pytest.fixture(scope="session")
def s1():
    return build_named_set("S1")


@pytest.fixture(scope="session")
def s2():
    return build_named_set("S2")


@pytest.fixture(scope="session")
def domino():
    return build_named_set("Domino")


@pytest.fixture(scope="session")
def union_s():
    return build_named_set("UnionS")
