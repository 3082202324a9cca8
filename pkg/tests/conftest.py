import numpy as np
import pytest

from epsnets.instances import generate
from epsnets.ranges import TraceEnumerator

ACCEPTANCE_BOX = 10**5


@pytest.fixture(scope="session")
def enum_cache():
    """Shared TraceEnumerator cache keyed by instance identity."""
    cache: dict = {}

    def get(points) -> TraceEnumerator:
        key = (points.shape, points.tobytes())
        if key not in cache:
            cache[key] = TraceEnumerator(points)
        return cache[key]

    return get


def seeded_points(n: int, seed: int, dim: int = 3, box: int = ACCEPTANCE_BOX) -> np.ndarray:
    return generate("cube_uniform", n, seed, dim=dim, box=box).points
