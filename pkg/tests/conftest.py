import numpy as np
import pytest

from fibspec.jacobi import Coupling

# coupling set used by the cross-validation checks
CHECK_COUPLINGS = [Coupling(1, 0), Coupling(2, 0), Coupling(1, 2), Coupling(2, 1), Coupling(0.5, -1)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=CHECK_COUPLINGS, ids=lambda c: f"p{c.p:g}_q{c.q:g}")
def coupling(request):
    return request.param
