import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crossdiff.kernels import get_backend, numba_backend


def _backend_params():
    params = ["numpy"]
    if numba_backend is not None:
        params.append("numba")
    return params


@pytest.fixture(params=_backend_params())
def backend(request):
    """Kernel backend module, parametrized over the available implementations."""
    return get_backend(request.param)
