import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "exact", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")


@pytest.fixture
def rng():
    return random.Random(20261017)


def random_rational(rng, span=50, den=30):
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))
