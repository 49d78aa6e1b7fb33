import pytest
from hypothesis import settings

from wallcross.services.kgit import build_model

settings.register_profile('wallcross', deadline=None, max_examples=50)
settings.load_profile('wallcross')


@pytest.fixture
def local_p1():
    return build_model((1, 1, -2), -1)


@pytest.fixture
def conifold():
    return build_model((1, 1, -1, -1), -1)
