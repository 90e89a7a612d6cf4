import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairsched.model import (ClusterState, FrameworkSpec, ResourceVector,
                             ServerSpec)


def make_state(servers, frameworks):
    """servers: list of capacity tuples; frameworks: list of demand tuples
    or (demand tuple, weight)."""
    specs = [ServerSpec(i, ResourceVector(c)) for i, c in enumerate(servers)]
    fws = []
    for n, f in enumerate(frameworks):
        if isinstance(f, tuple) and len(f) == 2 and isinstance(f[0], (tuple, list)):
            demand, weight = f
        else:
            demand, weight = f, 1
        fws.append(FrameworkSpec(n, ResourceVector(demand), Fraction(weight)))
    return ClusterState(specs, fws)


@pytest.fixture
def illustrative():
    """Two servers with transposed capacities, two complementary demands."""
    return make_state([(100, 30), (30, 100)], [(5, 1), (1, 5)])


def random_instance(rng: random.Random, max_servers=2, max_frameworks=2,
                    max_capacity=12):
    ns = rng.randint(1, max_servers)
    nf = rng.randint(1, max_frameworks)
    nr = rng.randint(1, 2)
    servers = [tuple(rng.randint(1, max_capacity) for _ in range(nr))
               for _ in range(ns)]
    frameworks = []
    for _ in range(nf):
        d = [rng.randint(0, 4) for _ in range(nr)]
        if not any(d):
            d[rng.randrange(nr)] = 1
        frameworks.append(tuple(d))
    return make_state(servers, frameworks)
