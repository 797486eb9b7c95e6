import os

import pytest
from hypothesis import HealthCheck, settings

from gpdext import fixtures as F

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(params=sorted(F.ABELIAN_FIXTURES))
def abelian_fixture(request):
    return request.param, F.fixture(request.param)
