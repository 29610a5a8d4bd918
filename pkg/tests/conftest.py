import numpy as np
import pytest

from hitchin_flows.hyp_plane import octagon_rep, triangle_rep
from hitchin_flows.lie_core import sym_embed


@pytest.fixture(scope="session")
def octagon():
    return octagon_rep()


@pytest.fixture(scope="session")
def octagon3(octagon):
    return octagon.map(lambda m: sym_embed(m, 3))


@pytest.fixture(scope="session")
def pres(octagon):
    return octagon.presentation


@pytest.fixture(scope="session")
def tri237():
    return triangle_rep(2, 3, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sl(rng, n, scale=0.5):
    g = np.eye(n) + scale * rng.standard_normal((n, n))
    sign, logdet = np.linalg.slogdet(g)
    if sign < 0:
        g[:, 0] *= -1
        logdet = np.linalg.slogdet(g)[1]
    return g / np.exp(logdet / n)


def loxodromic(rng, n, gaps=None):
    """``g diag(exp x) g^-1`` with well separated ``x``; returns (M, x, g)."""
    if gaps is None:
        gaps = rng.uniform(0.4, 1.2, n - 1)
    x = np.concatenate([[0.0], -np.cumsum(gaps)])
    x -= x.mean()
    g = random_sl(rng, n)
    while np.linalg.cond(g) > 50:
        g = random_sl(rng, n)
    M = g @ np.diag(np.exp(x)) @ np.linalg.inv(g)
    return M, x, g
