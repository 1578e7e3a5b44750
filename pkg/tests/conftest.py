import numba
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

numba.set_num_threads(max(1, numba.config.NUMBA_NUM_THREADS))


@pytest.fixture
def rng():
    from partigrowth.rng import RngStream

    return RngStream(1234, 0)
