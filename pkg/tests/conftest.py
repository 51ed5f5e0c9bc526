import random

import pytest
from hypothesis import HealthCheck, settings

from wlsa import corpus

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def c6_pair():
    return corpus.cycle(6), corpus.graph_union(corpus.cycle(3), corpus.cycle(3))
