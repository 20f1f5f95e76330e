import numpy as np
import pytest

from relaxed_greedy.analysis import trial_instance, trial_seeds

TRIAL_DIMS = (2, 8, 16, 64)


def random_instances(seed=2024, trials=100):
    return [trial_instance(s, TRIAL_DIMS[t % len(TRIAL_DIMS)])
            for t, s in enumerate(trial_seeds(seed, trials))]


@pytest.fixture(scope="session")
def instances():
    return random_instances()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
