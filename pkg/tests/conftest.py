import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def report10():
    from arithdeg.vsolve import solve_params

    return solve_params(10, 256)
