import numpy as np
import pytest

from components.liealg import HKGroupSpec
from components.quotient_metric import preset

# the preset list used by the oracle and curvature checks
PRESET_CASES = {
    "taub-nut-1": ("taub-nut", {"theta": 1.0}),
    "taub-nut-2": ("taub-nut", {"theta": 2.0}),
    "taubian-calabi-2": ("taubian-calabi", {"m": 2}),
    "taubian-calabi-3": ("taubian-calabi", {"m": 3}),
    "lwy-id2": ("lwy", {"theta": [[1.0, 0.0], [0.0, 1.0]]}),
    "lwy-lower2": ("lwy", {"theta": [[1.0, 0.0], [1.0, 2.0]]}),
}


def random_hk_spec(rng, max_q=4):
    q = int(rng.integers(1, max_q + 1))
    k = int(rng.integers(1, q + 1))
    p = -(-k // 4) + int(rng.integers(0, 2))
    theta = rng.standard_normal((q, k))
    return HKGroupSpec(s=4 * p - k, k=k, q=q, theta=theta)


def random_flat_spec(rng, max_m=4):
    m = int(rng.integers(1, max_m + 1))
    k = int(rng.integers(1, m + 1))
    s = int(rng.integers(0, 3))
    if (s + k) % 2:
        s += 1
    return HKGroupSpec(s=s, k=k, q=m, theta=rng.standard_normal((m, k)), mode="flat2m")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def taub_nut():
    return preset("taub-nut", theta=1.0)


@pytest.fixture
def taubian_calabi():
    return preset("taubian-calabi", m=2)


@pytest.fixture
def lwy():
    return preset("lwy", theta=[[1.0, 0.0], [1.0, 2.0]])


@pytest.fixture(params=sorted(PRESET_CASES))
def any_preset(request):
    name, kwargs = PRESET_CASES[request.param]
    return preset(name, **kwargs)


@pytest.fixture
def hk_specs(rng):
    return [random_hk_spec(rng) for _ in range(50)]
