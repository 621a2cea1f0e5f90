import pytest
from hypothesis import HealthCheck, settings

from gerbecalc.complex import example_complex

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def spaces():
    names = ("sphere3", "rp2", "torus2", "torus3", "rp2_x_s1")
    return {n: example_complex(n) for n in names}
