import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spd(rng, p, spread=3.0):
    """Random SPD matrix with eigenvalues in [1, 1 + spread]."""
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    w = 1.0 + spread * rng.random(p)
    return (q * w) @ q.T


def gaussian_moment(sigma, key):
    """Exact raw moment of a zero-mean Gaussian by Wick pairing (degree <= 4)."""
    if len(key) % 2:
        return 0.0
    if not key:
        return 1.0
    if len(key) == 2:
        return sigma[key[0], key[1]]
    a, b, c, d = key
    return sigma[a, b] * sigma[c, d] + sigma[a, c] * sigma[b, d] + sigma[a, d] * sigma[b, c]


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
