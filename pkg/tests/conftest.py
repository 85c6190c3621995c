import pytest
from hypothesis import settings

from gamesec.lattice import chain, l4

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def lat():
    return l4()


@pytest.fixture
def ex1_lat():
    return chain("bot", "bob", "admin")
