import pytest

from jumplab.bits import RngStream


@pytest.fixture
def rng():
    return RngStream(2024)
