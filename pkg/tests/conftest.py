import numpy as np
import pytest

from membench.params import apply_overrides, default_config

# every stochastic knob off; mirrors configs/noise_off.conf
NOISE_OFF = {
    "device.sigma_d2d": 0.0,
    "device.sigma_c2c": 0.0,
    "device.rtn_amplitude": 0.0,
    "device.read_noise_sigma": 0.0,
    "device.disturb_rate": 0.0,
    "device.endurance.spread_decades": 0.0,
    "sense.offset_sigma": 0.0,
}

DESK_ENDURANCE = {
    "device.endurance.log10_endurance_at_vref": 5.0,
    "device.endurance.spread_decades": 0.0,
}


@pytest.fixture
def config():
    return default_config()


@pytest.fixture
def quiet_config():
    return apply_overrides(default_config(), NOISE_OFF)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
