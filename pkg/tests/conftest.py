import math

import numpy as np
import pytest

from qmzi.mzi import make_input
from qmzi.states import custom_state, q_cat, q_coherent


@pytest.fixture
def small_input():
    return make_input(q_coherent(0.8, 0.7, 30), q_cat(0.9, 0.7, "even", 30))


def random_state(rng, n_max):
    return custom_state(rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1))


def random_input(seed, n_max=6):
    rng = np.random.default_rng(seed)
    return make_input(random_state(rng, n_max), random_state(rng, n_max), phase_matched=False)


PHIS = (0.3, math.pi / 2, 2.0)
