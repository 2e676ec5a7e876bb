import numpy as np
import pytest

from treecal import Box, Forecast, L1Ball, L2Ball, Simplex, Transcript


def random_forecast(domain, rng, max_atoms=3, labeled=False):
    k = int(rng.integers(1, max_atoms + 1))
    points = np.stack([domain.sample(rng) for _ in range(k)])
    weights = rng.random(k) + 0.1
    weights /= weights.sum()
    labels = tuple((int(i),) for i in rng.permutation(10)[:k]) if labeled else None
    return Forecast(points, weights, labels)


def random_transcript(domain, T, rng, max_atoms=3, labeled=False):
    forecasts = tuple(
        random_forecast(domain, rng, max_atoms=max_atoms, labeled=labeled)
        for _ in range(T)
    )
    outcomes = np.stack([domain.sample(rng) for _ in range(T)])
    return Transcript(domain, forecasts, outcomes)


def small_domains():
    return [Simplex(2), Simplex(3), Box(2, 0.0, 1.0), L1Ball(2, 1.0), L2Ball(3, 1.0)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
