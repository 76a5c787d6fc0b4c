"""
Shared test fixtures and configuration
"""

import numpy as np
import pytest

from config import settings
from services.family_builder import (build_hyperplane_family, build_real_family,
                                     hyperplane_family_from_frame, r3_counterexample_family,
                                     r3_example_recipe, r3_parseval_example)
from services.linalg_core import RngState


@pytest.fixture
def rng():
    """Deterministic random state for a single test"""
    return RngState(12345)


@pytest.fixture
def restore_settings():
    """Restore the shared settings after a test that mutates them"""
    snapshot = settings.model_dump()
    yield settings
    for name, value in snapshot.items():
        setattr(settings, name, value)


@pytest.fixture(scope="session")
def real_family_m4():
    """Certified-by-construction real family in R^4 with a mixed dimension profile"""
    return build_real_family(4, [3, 2, 2, 1, 2, 2, 1], RngState(7))


@pytest.fixture(scope="session")
def r3_recipe():
    """Recipe of the first R^3 example family"""
    return r3_example_recipe()


@pytest.fixture(scope="session")
def r3_families():
    """The R^3 example family and its family of orthogonal complements"""
    return r3_counterexample_family()


@pytest.fixture(scope="session")
def parseval_hyperplanes():
    """Hyperplane family built from the five-vector Parseval frame in R^3"""
    return hyperplane_family_from_frame(r3_parseval_example())


@pytest.fixture(scope="session")
def random_hyperplanes():
    """Seeded hyperplane family with M=4, N=7"""
    return build_hyperplane_family(4, 7, RngState(3))


def sign_distance(a, b) -> float:
    """Relative distance between a and b up to a global sign"""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.linalg.norm(b), 1e-300)
    return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) / scale


def certified_families(ambients=range(2, 9), profiles: int = 5):
    """Seeded 2M-1 families with random dimension profiles in [1, M-1]"""
    for M in ambients:
        for profile in range(profiles):
            rng = RngState(1000 * M + profile)
            dims = [int(d) for d in rng.integers(1, M, size=2 * M - 1)]
            family, recipe = build_real_family(M, dims, rng)
            yield family, recipe
