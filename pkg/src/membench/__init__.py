"""membench: behavioral simulator of a memristor-CMOS prototyping die.

The model covers an 8,192-device hafnium-oxide memristor array organized as
64x64 complementary 2T2R cells, its digital periphery (decoders, write
drivers, precharge sense amplifiers doubling as XNOR gates), and an analog
test-access path (routing shift register, two probe pads, waveform engine).
All stochastic behavior — device variability, programming noise, RTN, read
noise, read disturb, endurance wear-out — flows from a single seeded
generator, so every simulation is reproducible from (seed, configuration).

A virtual test bench rides on top: a line-oriented control protocol served
over TCP or stdio, plus canned experiments runnable from the command line.
"""

from .backends import ACTIVE_BACKEND_NAME, available_backends
from .chip import Chip, ChipMode
from .errors import (
    AddressError,
    BenchError,
    InvariantViolation,
    ModeError,
    ParameterError,
    StateError,
)
from .params import ChipConfig, DeviceParams, default_config, load_config
from .protocol import BenchSession

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND_NAME",
    "AddressError",
    "BenchError",
    "BenchSession",
    "Chip",
    "ChipConfig",
    "ChipMode",
    "DeviceParams",
    "InvariantViolation",
    "ModeError",
    "ParameterError",
    "StateError",
    "__version__",
    "available_backends",
    "default_config",
    "load_config",
]
