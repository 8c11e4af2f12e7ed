import numpy as np
import pytest

from dacdelay.graph import chorded_ring_graph, ring_graph


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260824)


@pytest.fixture
def ring6():
    return ring_graph(6)


@pytest.fixture
def chorded():
    return chorded_ring_graph()
