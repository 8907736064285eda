"""Top-level die model: one array, one RNG, one operating mode.

The chip is the ownership boundary for randomness: every stochastic draw in
a simulation flows through ``chip.rng``, so a (seed, config) pair pins the
entire behavior.  Digital mode exposes the through-periphery operations
(form/write/sense); analog mode bypasses them and exposes the routing shift
register and the pad waveform engine.  Operations check the active mode and
refuse to run in the wrong one, mirroring the mutually exclusive circuit
configurations of the die.
"""

from __future__ import annotations

import enum
import json

import numpy as np

from . import analog as _analog
from . import digital as _digital
from .array import CellAddress, HalfSelectReport, MemristorArray, WriteReport
from .device import MemristorState
from .errors import ModeError, ParameterError, StateError
from .params import ChipConfig, apply_overrides, default_config, dump_config, flatten_config
from .analog import AnalogRouting, Waveform, decode_shift_register, encode_shift_register

SNAPSHOT_FORMAT = "membench-snapshot"
SNAPSHOT_VERSION = 1


class ChipMode(enum.Enum):
    DIGITAL = "DIGITAL"
    ANALOG = "ANALOG"


class Chip:
    def __init__(self, config: ChipConfig | None = None, seed: int | None = None):
        self.config = config if config is not None else default_config()
        self.config.validate()
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.array = MemristorArray(self.config, self.rng)
        self.mode = ChipMode.DIGITAL
        self.routing = AnalogRouting.all_floating(self.config.geometry)

    # -- mode ---------------------------------------------------------------

    def set_mode(self, mode: ChipMode | str) -> ChipMode:
        if isinstance(mode, str):
            try:
                mode = ChipMode[mode.upper()]
            except KeyError:
                raise ParameterError(f"unknown mode {mode!r}") from None
        self.mode = mode
        return self.mode

    def _require(self, mode: ChipMode) -> None:
        if self.mode is not mode:
            raise ModeError(f"operation requires {mode.value} mode, chip is in {self.mode.value}")

    # -- digital operations ---------------------------------------------------

    def form_cell(self, row: int, col: int) -> None:
        self._require(ChipMode.DIGITAL)
        self.array.form_cell(CellAddress(row, col), self.config.forming)

    def form_all(self) -> None:
        self._require(ChipMode.DIGITAL)
        for addr in self.array.iter_addresses():
            self.array.form_cell(addr, self.config.forming)

    def write_bit(self, row: int, col: int, bit: int) -> WriteReport:
        self._require(ChipMode.DIGITAL)
        return self.array.write_bit(CellAddress(row, col), bit, self.config.programming)

    def read_bit(self, row: int, col: int) -> int:
        self._require(ChipMode.DIGITAL)
        cell = self.array.cell(CellAddress(row, col))
        return _digital.sense(cell, self.config.device, self.config.sense, self.rng)

    def read_bit_with_reference(self, row: int, col: int) -> tuple[int, int]:
        self._require(ChipMode.DIGITAL)
        cell = self.array.cell(CellAddress(row, col))
        return _digital.sense_with_reference(cell, self.config.device, self.config.sense, self.rng)

    def xnor(self, row: int, col: int, logic_input: int) -> int:
        self._require(ChipMode.DIGITAL)
        if logic_input not in (0, 1):
            raise ParameterError("logic input must be 0 or 1")
        cell = self.array.cell(CellAddress(row, col))
        return _digital.sense(cell, self.config.device, self.config.sense, self.rng, logic_input)

    def cycle_cell(self, row: int, col: int, n_writes: int, first_bit: int = 1) -> None:
        self._require(ChipMode.DIGITAL)
        self.array.cycle_cell(CellAddress(row, col), n_writes, first_bit, self.config.programming)

    def cycle_cell_batched(self, row: int, col: int, n_writes: int, first_bit: int = 1) -> None:
        self._require(ChipMode.DIGITAL)
        self.array.cycle_cell_batched(
            CellAddress(row, col), n_writes, first_bit, self.config.programming
        )

    def half_select_report(self, row: int, col: int, bit: int = 1) -> HalfSelectReport:
        return self.array.half_select_report(
            CellAddress(row, col), bit, self.config.programming, self.config.forming
        )

    # -- analog operations ----------------------------------------------------

    def load_shift_register(self, bits) -> None:
        self._require(ChipMode.ANALOG)
        self.routing = decode_shift_register(bits, self.config.geometry)

    def set_routing(self, routing: AnalogRouting) -> None:
        self._require(ChipMode.ANALOG)
        routing.validate(self.config.geometry)
        self.routing = routing

    @property
    def routing_bits(self) -> str:
        return encode_shift_register(self.routing)

    def apply_waveform(self, pad: str, waveform: Waveform) -> np.ndarray:
        self._require(ChipMode.ANALOG)
        return _analog.apply_waveform(self.array, self.routing, pad, waveform, self.rng)

    def measure_resistance(self, pad: str, v_meas: float, n_avg: int = 8) -> float:
        self._require(ChipMode.ANALOG)
        return _analog.measure_resistance(self.array, self.routing, pad, v_meas, n_avg, self.rng)

    # -- lifecycle ------------------------------------------------------------

    def set_config(self, config: ChipConfig) -> None:
        """Swap the live configuration for subsequent operations.

        Per-device frozen samples (d2d factors, endurance budgets) were drawn
        under the old configuration and persist, like swapping instrument
        settings on a real die.  Geometry is fixed once the array exists.
        """
        config.validate()
        if config.geometry != self.config.geometry:
            raise StateError("array geometry is fixed for a live die; reseed a new chip instead")
        self.config = config
        self.array.config = config
        self.array.geometry = config.geometry

    def reseed(self, seed: int | None) -> None:
        """Fresh die, fresh stream; keeps the configuration."""
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.array = MemristorArray(self.config, self.rng)
        self.mode = ChipMode.DIGITAL
        self.routing = AnalogRouting.all_floating(self.config.geometry)

    def effective_config_text(self) -> str:
        return dump_config(self.config)

    # -- snapshots ------------------------------------------------------------

    def snapshot_dict(self) -> dict:
        """Full state: config, RNG stream position, routing, every device."""
        devices = []
        for addr in self.array.iter_addresses():
            cell = self.array.cells[addr.row][addr.col]
            for dev in (cell.dev_bl, cell.dev_blb):
                devices.append(
                    [
                        dev.w,
                        int(dev.formed),
                        dev.cycle_count,
                        dev.endurance_limit,
                        dev.degradation,
                        dev.d2d_factor,
                        dev.rtn_phase,
                    ]
                )
        return {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "mode": self.mode.value,
            "seed": self.seed,
            "config": flatten_config(self.config),
            "rng_state": self.rng.bit_generator.state,
            "routing": self.routing_bits,
            "devices": devices,
        }

    def save_snapshot(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.snapshot_dict(), fh)
            fh.write("\n")

    @classmethod
    def from_snapshot_dict(cls, data: dict) -> "Chip":
        if not isinstance(data, dict) or data.get("format") != SNAPSHOT_FORMAT:
            raise StateError("not a chip snapshot")
        if data.get("version") != SNAPSHOT_VERSION:
            raise StateError(f"unsupported snapshot version {data.get('version')!r}")
        try:
            config = apply_overrides(default_config(), data["config"])
            chip = cls(config, seed=data.get("seed"))
            chip.rng.bit_generator.state = data["rng_state"]
            chip.mode = ChipMode(data["mode"])
            chip.routing = decode_shift_register(data["routing"], config.geometry)
            devices = data["devices"]
        except (KeyError, ValueError) as exc:
            raise StateError(f"malformed snapshot: {exc}") from None
        expected = config.geometry.n_devices
        if len(devices) != expected:
            raise StateError(f"snapshot holds {len(devices)} devices, expected {expected}")
        it = iter(devices)
        for addr in chip.array.iter_addresses():
            cell = chip.array.cells[addr.row][addr.col]
            for dev in (cell.dev_bl, cell.dev_blb):
                rec = next(it)
                dev.w = float(rec[0])
                dev.formed = bool(rec[1])
                dev.cycle_count = int(rec[2])
                dev.endurance_limit = int(rec[3])
                dev.degradation = float(rec[4])
                dev.d2d_factor = float(rec[5])
                dev.rtn_phase = int(rec[6])
        return chip

    @classmethod
    def load_snapshot(cls, path) -> "Chip":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise StateError(f"snapshot file is not valid JSON: {exc}") from None
        return cls.from_snapshot_dict(data)
