import cmath
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from osq import kernels

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")


def max_abs(a, b=0):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def phase_amp(d, k, n):
    """<n|phi_k> evaluated straight from the defining formula."""
    return cmath.exp(-1j * n * 2 * math.pi * k / d) / math.sqrt(d)


@pytest.fixture(params=["numpy", "numba"])
def kernel_set(request):
    return kernels.NUMPY_KERNELS if request.param == "numpy" else kernels.NUMBA_KERNELS
