import numpy as np
import pytest

from greyvar.sampling import RngSpec

MASTER_SEED = 20260810


@pytest.fixture
def rng():
    return RngSpec(MASTER_SEED, 0)


def gl_quad(f, a, b, panels=24, order=48):
    """Composite Gauss-Legendre quadrature, local to the tests so oracle
    integrations do not depend on library internals."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        total += half * sum(w * f(mid + half * x) for x, w in zip(nodes, weights))
    return float(total)


def mwright_cutoff(beta, log_cut=21.0):
    """tau where the M-Wright tail exp(-b tau^(1/(1-beta))) reaches exp(-log_cut)."""
    b = (1.0 - beta) * beta ** (beta / (1.0 - beta))
    return (log_cut / b) ** (1.0 - beta)
