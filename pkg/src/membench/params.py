"""Parameter records and the dotted-key config file format.

All tunables of the simulator live in small dataclasses aggregated by
:class:`ChipConfig`.  A config file is plain text, one ``dotted.key = number``
per line with ``#`` comments; :func:`dump_config` emits the effective
configuration in the same format so a dump can be fed straight back in.

None of the default magnitudes below are measured values; they are typical
HfO2 RRAM literature numbers chosen so the qualitative behavior (weak 1 V
RESET pulses, abrupt programming at 2+ V) comes out right.  Everything is
overridable from a config file.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields

from .errors import ParameterError


@dataclass
class EnduranceModel:
    """Log-linear endurance vs programming overdrive, clamped to [1e3, 1e9].

    A device's cycle budget is 10**x with
    x ~ Normal(log10_endurance_at_vref + slope * (v_prog - vref), spread),
    clamped to [3, 9] decades.
    """

    log10_endurance_at_vref: float = 9.0
    endurance_voltage_slope: float = -3.0  # decades per volt of overdrive
    vref: float = 2.2
    spread_decades: float = 0.3

    MIN_DECADES = 3.0
    MAX_DECADES = 9.0

    def validate(self) -> None:
        if self.spread_decades < 0:
            raise ParameterError("endurance spread_decades must be >= 0")
        if not (self.MIN_DECADES <= self.log10_endurance_at_vref <= self.MAX_DECADES):
            raise ParameterError("log10_endurance_at_vref must lie in [3, 9]")


@dataclass
class DeviceParams:
    """Compact-model parameters for one HfO2 memristor."""

    g_on_median: float = 1.0e-4  # S, LRS conductance (10 kOhm)
    g_off_median: float = 5.0e-6  # S, HRS conductance (200 kOhm)
    sigma_d2d: float = 0.15  # lognormal sigma, frozen per device
    sigma_c2c: float = 0.10  # lognormal sigma, fresh per programming event
    rtn_amplitude: float = 0.05  # two-level conductance fluctuation, relative
    rtn_switch_prob: float = 0.10  # per-read phase toggle probability
    read_noise_sigma: float = 0.05  # relative current noise per read sample
    v_form_min: float = 3.0  # V
    v_set_min: float = 1.8  # V
    v_reset_min: float = 0.9  # V, so 1 V pulses are weakly progressive
    t_min: float = 1.0e-7  # s, shorter pulses have no effect
    reset_step_gain: float = 2.0e-4  # per-pulse filament decay at the reference point
    reset_beta: float = 8.0  # 1/V, exponential overdrive sensitivity of RESET
    reset_od_ref: float = 0.1  # V, overdrive where the decay equals reset_step_gain
    reset_width_ref: float = 1.5e-6  # s, width where the decay equals reset_step_gain
    disturb_rate: float = 1.0e-4  # per-read probability of a SET-direction drift
    disturb_step: float = 1.0e-3  # filament increment per disturb event
    stuck_w: float = 0.5  # collapse point the window shrinks toward
    degradation_steepness: float = 12.0  # logistic slope in log10(cycles)
    read_voltage: float = 0.2  # V, nominal read bias
    endurance: EnduranceModel = field(default_factory=EnduranceModel)

    def validate(self) -> None:
        if not (self.g_on_median > self.g_off_median > 0):
            raise ParameterError("need g_on_median > g_off_median > 0")
        for name in (
            "sigma_d2d",
            "sigma_c2c",
            "rtn_amplitude",
            "read_noise_sigma",
            "t_min",
            "reset_step_gain",
            "disturb_rate",
            "disturb_step",
        ):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if not (0.0 <= self.rtn_switch_prob <= 1.0):
            raise ParameterError("rtn_switch_prob must lie in [0, 1]")
        if not (0.0 <= self.disturb_rate <= 1.0):
            raise ParameterError("disturb_rate must lie in [0, 1]")
        if self.v_form_min < self.v_set_min:
            raise ParameterError("need v_form_min >= v_set_min")
        if self.v_set_min <= 0 or self.v_reset_min <= 0:
            raise ParameterError("switching thresholds must be positive")
        if not (0.0 <= self.stuck_w <= 1.0):
            raise ParameterError("stuck_w must lie in [0, 1]")
        if abs(self.read_voltage) >= min(self.v_set_min, self.v_reset_min):
            raise ParameterError("read_voltage must stay below switching thresholds")
        if self.reset_width_ref <= 0:
            raise ParameterError("reset_width_ref must be > 0")
        self.endurance.validate()

    def noiseless(self) -> "DeviceParams":
        """Copy with every stochastic term switched off (for oracle tests)."""
        p = dataclasses.replace(
            self,
            sigma_d2d=0.0,
            sigma_c2c=0.0,
            rtn_amplitude=0.0,
            read_noise_sigma=0.0,
            disturb_rate=0.0,
            endurance=dataclasses.replace(self.endurance, spread_decades=0.0),
        )
        return p


@dataclass
class ArrayGeometry:
    """Array split: rows x cell columns of complementary (2-device) cells.

    The physical die holds 8,192 devices; the row/column split is a
    configurable assumption (64 x 64 cells by default).
    """

    rows: int = 64
    cell_cols: int = 64

    DEVICES_PER_CELL = 2

    @property
    def n_cells(self) -> int:
        return self.rows * self.cell_cols

    @property
    def n_devices(self) -> int:
        return self.n_cells * self.DEVICES_PER_CELL

    @property
    def n_bit_lines(self) -> int:
        # one BL/BLB pair per cell column
        return self.cell_cols * 2

    def validate(self) -> None:
        if self.rows < 1 or self.cell_cols < 1:
            raise ParameterError("geometry counts must be >= 1")


@dataclass
class VoltageDomains:
    """Supply domains the level shifters translate into."""

    v_dd_logic: float = 1.2
    v_prog: float = 2.2
    v_form: float = 3.3

    def validate(self) -> None:
        if not (self.v_form >= self.v_prog > self.v_dd_logic > 0):
            raise ParameterError("need v_form >= v_prog > v_dd_logic > 0")


@dataclass
class SenseConfig:
    """Precharge sense amplifier model: conductance comparator with offset."""

    offset_sigma: float = 5.0e-6  # S, Gaussian input-referred offset
    sense_margin_min: float = 2.0e-5  # S, below this the outcome is noise-dominated
    g_ref: float = 2.2360679774997897e-5  # S, 1T1R fixed reference (geomean of medians)

    def validate(self) -> None:
        if self.offset_sigma < 0 or self.sense_margin_min < 0:
            raise ParameterError("sense sigmas/margins must be >= 0")
        if self.g_ref <= 0:
            raise ParameterError("g_ref must be > 0")


@dataclass
class ProgrammingProfile:
    """Line voltages and timing for one digital write (two phases).

    inhibit_voltage is the level forced onto unselected bit lines while the
    shared source line is driven during the RESET phase; None means "track
    the source line", which is the only half-select-safe choice and the
    default.  It is overridable so tests can provoke violations.
    """

    set_voltage: float = 2.2
    reset_voltage: float = 2.2
    gate_voltage: float = 2.2
    pulse_width: float = 1.0e-6
    inhibit_voltage: float | None = None

    def validate(self) -> None:
        if self.pulse_width <= 0:
            raise ParameterError("pulse_width must be > 0")
        if self.set_voltage <= 0 or self.reset_voltage <= 0:
            raise ParameterError("programming voltages must be > 0")


@dataclass
class FormingProfile:
    """One-time forming pulse per device."""

    form_voltage: float = 3.3
    gate_voltage: float = 3.3
    pulse_width: float = 1.0e-5

    def validate(self) -> None:
        if self.pulse_width <= 0:
            raise ParameterError("pulse_width must be > 0")
        if self.form_voltage <= 0:
            raise ParameterError("form_voltage must be > 0")


@dataclass
class ChipConfig:
    """Everything a simulator instance needs, bundled."""

    device: DeviceParams = field(default_factory=DeviceParams)
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry)
    domains: VoltageDomains = field(default_factory=VoltageDomains)
    sense: SenseConfig = field(default_factory=SenseConfig)
    programming: ProgrammingProfile = field(default_factory=ProgrammingProfile)
    forming: FormingProfile = field(default_factory=FormingProfile)

    def validate(self) -> None:
        self.device.validate()
        self.geometry.validate()
        self.domains.validate()
        self.sense.validate()
        self.programming.validate()
        self.forming.validate()


# config-file section name -> ChipConfig attribute
_SECTIONS = {
    "device": "device",
    "array": "geometry",
    "digital": "domains",
    "sense": "sense",
    "programming": "programming",
    "forming": "forming",
}


def _flatten(prefix: str, obj) -> dict[str, float | int | None]:
    out: dict[str, float | int | None] = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        key = f"{prefix}.{f.name}"
        if dataclasses.is_dataclass(value):
            out.update(_flatten(key, value))
        else:
            out[key] = value
    return out


def flatten_config(config: ChipConfig) -> dict[str, float | int | None]:
    """Effective configuration as a flat dotted-key mapping."""
    out: dict[str, float | int | None] = {}
    for section, attr in _SECTIONS.items():
        out.update(_flatten(section, getattr(config, attr)))
    return out


def dump_config(config: ChipConfig) -> str:
    """Render the effective configuration in the loadable text format."""
    lines = []
    for key, value in sorted(flatten_config(config).items()):
        if value is None:
            lines.append(f"# {key} = (auto)")
        else:
            lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> dict[str, float]:
    """Parse ``dotted.key = number`` lines; blank lines and # comments skipped."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value'")
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        try:
            values[key] = float(rhs)
        except ValueError:
            raise ParameterError(f"config line {lineno}: {rhs!r} is not a number") from None
    return values


def apply_overrides(config: ChipConfig, overrides: dict[str, float]) -> ChipConfig:
    """Return a new ChipConfig with the given dotted keys replaced."""
    cfg = dataclasses.replace(
        config,
        device=dataclasses.replace(
            config.device, endurance=dataclasses.replace(config.device.endurance)
        ),
        geometry=dataclasses.replace(config.geometry),
        domains=dataclasses.replace(config.domains),
        sense=dataclasses.replace(config.sense),
        programming=dataclasses.replace(config.programming),
        forming=dataclasses.replace(config.forming),
    )
    for key, value in overrides.items():
        parts = key.split(".")
        if len(parts) < 2 or parts[0] not in _SECTIONS:
            raise ParameterError(f"unknown config key {key!r}")
        obj = getattr(cfg, _SECTIONS[parts[0]])
        for part in parts[1:-1]:
            if not hasattr(obj, part) or not dataclasses.is_dataclass(getattr(obj, part)):
                raise ParameterError(f"unknown config key {key!r}")
            obj = getattr(obj, part)
        leaf = parts[-1]
        if not hasattr(obj, leaf):
            raise ParameterError(f"unknown config key {key!r}")
        current = getattr(obj, leaf)
        if value is None:
            # optional fields ('auto' sentinels) round-trip through snapshots
            setattr(obj, leaf, None)
        elif isinstance(current, int) and not isinstance(current, bool):
            if value != int(value):
                raise ParameterError(f"{key} takes an integer, got {value}")
            setattr(obj, leaf, int(value))
        else:
            setattr(obj, leaf, float(value))
    cfg.validate()
    return cfg


def load_config(path: str, base: ChipConfig | None = None) -> ChipConfig:
    """Load config file ``path`` on top of ``base`` (compiled defaults if None)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return apply_overrides(base if base is not None else ChipConfig(), parse_config_text(text))


def default_config() -> ChipConfig:
    return ChipConfig()


def geometric_mean_reference(device: DeviceParams) -> float:
    """1T1R comparison reference sitting mid-window (geometric mean)."""
    return math.sqrt(device.g_on_median * device.g_off_median)
