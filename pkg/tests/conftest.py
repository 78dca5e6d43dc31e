import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_spd(rng, dim, eig_lo=0.5, eig_hi=2.0):
    """Independent SPD construction for oracles: rotated explicit spectrum."""
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    vals = rng.uniform(eig_lo, eig_hi, size=dim)
    return (q * vals) @ q.T
