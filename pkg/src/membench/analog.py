"""Analog test access: routing shift register, pad waveforms, measurement.

In analog mode the digital periphery is bypassed.  A serial shift register
(two bits per line) routes every word line, bit line, and source line to one
of: floating, ground, pad A, or pad B.  An arbitrary piecewise-constant
waveform driven into one pad stresses every device that bridges that pad to
a return path, and the pad current is sampled on a fixed interval.

Conventions (fixed, relied on by the recipes and the bench protocol):

* Chain order: word-line block, then bit-line block in line order
  (BL0, BLB0, BL1, BLB1, ...), then source-line block; two bits per line,
  most significant bit first;
  ``00`` floating, ``01`` ground, ``10`` pad A, ``11`` pad B.
* A word line routed to either pad turns its access transistors fully on
  (gate waveforms are not modeled); routed to ground or floating they are
  off.
* While one pad is driven the other idles at 0 V, so it acts as a ground
  return.  A device bridging the driven pad between bit line and source
  line sees ``dv = +level`` when its bit line is on the pad and
  ``dv = -level`` when its source line is: positive stress is the SET/FORM
  polarity.  Devices with both data terminals on the driven pad are shorted
  out and see nothing.
* Stimuli are classified by physics, not intent: on an unformed device only
  a forming-level positive stress does anything; on a formed device
  ``dv >= v_set_min`` sets, ``dv <= -v_reset_min`` resets, and anything
  weaker is read-like (RTN step plus the disturb lottery).

Per segment the RNG stream is: one draw per routed device for the pulse
(in routed order: ascending gated row, then ascending line), then one
standard normal per device per sample instant, instant-major.  Runs of at
least ``FAST_PATH_MIN_RUN`` identical RESET segments on a single routed
device collapse into one kernel call that reproduces the scalar stream and
arithmetic bit for bit.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .array import MemristorArray
from .backends import active_backend
from .device import (
    MemristorState,
    PulseKind,
    PulseSpec,
    apply_pulse,
    conductance,
    degradation_level,
    _reset_eta_base,
)
from .errors import InvariantViolation, ParameterError, StateError
from .params import ArrayGeometry, DeviceParams

FAST_PATH_MIN_RUN = 16


class LineRoute(enum.IntEnum):
    FLOATING = 0
    GROUND = 1
    PAD_A = 2
    PAD_B = 3


PAD_ROUTES = {"A": LineRoute.PAD_A, "B": LineRoute.PAD_B}


@dataclass(frozen=True)
class AnalogRouting:
    """Decoded routing state: one :class:`LineRoute` per physical line."""

    wl: tuple[LineRoute, ...]
    bl: tuple[LineRoute, ...]
    sl: tuple[LineRoute, ...]

    @classmethod
    def all_floating(cls, geometry: ArrayGeometry) -> "AnalogRouting":
        return cls(
            wl=(LineRoute.FLOATING,) * geometry.rows,
            bl=(LineRoute.FLOATING,) * geometry.n_bit_lines,
            sl=(LineRoute.FLOATING,) * geometry.rows,
        )

    def validate(self, geometry: ArrayGeometry) -> None:
        if (
            len(self.wl) != geometry.rows
            or len(self.bl) != geometry.n_bit_lines
            or len(self.sl) != geometry.rows
        ):
            raise ParameterError("routing shape does not match the array geometry")


def chain_length(geometry: ArrayGeometry) -> int:
    return 2 * (geometry.rows + geometry.n_bit_lines + geometry.rows)


def decode_shift_register(bits, geometry: ArrayGeometry) -> AnalogRouting:
    """Decode a full shift-register image (string or sequence of 0/1)."""
    if isinstance(bits, str):
        values = []
        for ch in bits:
            if ch not in "01":
                raise ParameterError(f"shift register bits must be 0/1, got {ch!r}")
            values.append(ord(ch) - ord("0"))
    else:
        values = [int(b) for b in bits]
        if any(v not in (0, 1) for v in values):
            raise ParameterError("shift register bits must be 0/1")
    if len(values) != chain_length(geometry):
        raise ParameterError(
            f"shift register image must be {chain_length(geometry)} bits, got {len(values)}"
        )

    def take(n: int, offset: int) -> tuple[LineRoute, ...]:
        return tuple(
            LineRoute(2 * values[offset + 2 * i] + values[offset + 2 * i + 1])
            for i in range(n)
        )

    rows, lines = geometry.rows, geometry.n_bit_lines
    return AnalogRouting(
        wl=take(rows, 0),
        bl=take(lines, 2 * rows),
        sl=take(rows, 2 * rows + 2 * lines),
    )


def encode_shift_register(routing: AnalogRouting) -> str:
    """Inverse of :func:`decode_shift_register`."""
    return "".join(f"{int(code):02b}" for block in (routing.wl, routing.bl, routing.sl) for code in block)


def single_device_routing(
    geometry: ArrayGeometry, row: int, col: int, side: int, drive_pad: str = "B"
) -> AnalogRouting:
    """Routing that exposes exactly one device between ``drive_pad`` and ground.

    The word line goes to the other pad (gate on), the device's bit line to
    the driven pad, and the source line to ground.
    """
    if not (0 <= row < geometry.rows and 0 <= col < geometry.cell_cols and side in (0, 1)):
        raise ParameterError("device coordinates outside the array")
    if drive_pad not in PAD_ROUTES:
        raise ParameterError("pad must be 'A' or 'B'")
    other = "A" if drive_pad == "B" else "B"
    wl = [LineRoute.FLOATING] * geometry.rows
    bl = [LineRoute.FLOATING] * geometry.n_bit_lines
    sl = [LineRoute.FLOATING] * geometry.rows
    wl[row] = PAD_ROUTES[other]
    bl[2 * col + side] = PAD_ROUTES[drive_pad]
    sl[row] = LineRoute.GROUND
    return AnalogRouting(tuple(wl), tuple(bl), tuple(sl))


@dataclass(frozen=True)
class RoutedDevice:
    row: int
    col: int
    side: int
    line: int
    orientation: int  # +1 bit line on the driven pad, -1 source line


def devices_on_pad(
    routing: AnalogRouting, geometry: ArrayGeometry, pad: str
) -> list[RoutedDevice]:
    """Devices bridging ``pad`` to a return path, in routed order."""
    if pad not in PAD_ROUTES:
        raise ParameterError("pad must be 'A' or 'B'")
    routing.validate(geometry)
    pad_route = PAD_ROUTES[pad]
    out = []
    for row in range(geometry.rows):
        if routing.wl[row] not in (LineRoute.PAD_A, LineRoute.PAD_B):
            continue
        sl_route = routing.sl[row]
        if sl_route is LineRoute.FLOATING:
            continue
        for line in range(geometry.n_bit_lines):
            bl_route = routing.bl[line]
            if bl_route is LineRoute.FLOATING:
                continue
            on_bl = bl_route is pad_route
            on_sl = sl_route is pad_route
            if on_bl == on_sl:
                continue  # not on this pad, or shorted across it
            out.append(
                RoutedDevice(
                    row=row,
                    col=line // 2,
                    side=line % 2,
                    line=line,
                    orientation=1 if on_bl else -1,
                )
            )
    return out


# -- waveforms ---------------------------------------------------------------


@dataclass(frozen=True)
class WaveformSegment:
    level: float
    duration: float

    def __post_init__(self):
        if not (self.duration > 0.0) or not math.isfinite(self.duration):
            raise ParameterError("segment duration must be positive and finite")
        if not math.isfinite(self.level):
            raise ParameterError("segment level must be finite")


@dataclass(frozen=True)
class Waveform:
    segments: tuple[WaveformSegment, ...]
    sample_interval: float

    def __post_init__(self):
        if not self.segments:
            raise ParameterError("waveform needs at least one segment")
        if not (self.sample_interval > 0.0) or not math.isfinite(self.sample_interval):
            raise ParameterError("sample interval must be positive and finite")
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))


def waveform_from_csv(text: str, sample_interval: float) -> Waveform:
    """Parse a ``level_V,duration_s`` table into a waveform."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["level_V", "duration_s"]:
        raise ParameterError(f"unexpected waveform header {header!r}")
    segments = []
    for rownum, rec in enumerate(reader, start=2):
        if not rec:
            continue
        try:
            segments.append(WaveformSegment(float(rec[0]), float(rec[1])))
        except (ValueError, IndexError):
            raise ParameterError(f"bad waveform record on line {rownum}") from None
    return Waveform(tuple(segments), sample_interval)


def waveform_to_csv(waveform: Waveform) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level_V", "duration_s"])
    for seg in waveform.segments:
        writer.writerow([repr(seg.level), repr(seg.duration)])
    return buf.getvalue()


def samples_to_csv(samples: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t_s", "i_A"])
    for t, i in samples:
        writer.writerow([repr(float(t)), repr(float(i))])
    return buf.getvalue()


def _sample_schedule(waveform: Waveform) -> tuple[np.ndarray, np.ndarray]:
    """Sample instants and their segment indices.

    Instants sit on the grid ``k * sample_interval`` for ``k >= 0`` strictly
    inside the waveform.  Boundary comparisons get a relative nudge so an
    instant landing within rounding error of a segment edge belongs to the
    later segment (the natural reading when the interval divides the
    durations exactly).
    """
    dt = waveform.sample_interval
    total = waveform.total_duration
    n = int(math.ceil(total / dt - 1e-9))
    times = np.arange(n) * dt
    cum = np.cumsum([seg.duration for seg in waveform.segments])
    idx = np.searchsorted(cum, times + 1e-9 * dt, side="right")
    keep = idx < len(waveform.segments)
    return times[keep], idx[keep]


def _classify(dev: MemristorState, params: DeviceParams, dv: float, width: float) -> PulseSpec:
    """Map an applied stress onto the pulse class the device physics sees."""
    if not dev.formed:
        if dv >= params.v_form_min:
            return PulseSpec(dv, width, PulseKind.FORM)
        return PulseSpec(dv, width, PulseKind.READ)
    if dv >= params.v_set_min:
        return PulseSpec(dv, width, PulseKind.SET)
    if dv <= -params.v_reset_min:
        return PulseSpec(dv, width, PulseKind.RESET)
    return PulseSpec(dv, width, PulseKind.READ)


def _segment_runs(waveform: Waveform) -> list[tuple[int, int]]:
    """[start, stop) spans of consecutive identical segments."""
    runs = []
    start = 0
    segs = waveform.segments
    for i in range(1, len(segs) + 1):
        if i == len(segs) or segs[i] != segs[start]:
            runs.append((start, i))
            start = i
    return runs


def apply_waveform(
    array: MemristorArray,
    routing: AnalogRouting,
    pad: str,
    waveform: Waveform,
    rng: np.random.Generator,
) -> np.ndarray:
    """Drive ``waveform`` into ``pad`` and return the sampled pad current.

    Mutates every routed device segment by segment.  Returns an array of
    shape (n_samples, 2): time in seconds, pad current in amperes.  The pad
    current sums ``level * g * (1 + read_noise * z)`` over routed devices
    with an independent noise draw per device per instant.
    """
    params = array.config.device
    routed = devices_on_pad(routing, array.geometry, pad)
    if not routed:
        raise StateError(f"no device is routed across pad {pad}")
    devs = [array.device_at(r.row, r.col, r.side) for r in routed]
    orientations = [r.orientation for r in routed]
    times, seg_idx = _sample_schedule(waveform)
    currents = np.empty(len(times), dtype=float)
    sigma = params.read_noise_sigma
    # sample counts per segment, aligned with waveform.segments
    counts = np.bincount(seg_idx, minlength=len(waveform.segments))
    seg_sample_start = np.concatenate(([0], np.cumsum(counts)))

    for start, stop in _segment_runs(waveform):
        seg = waveform.segments[start]
        n_run = stop - start
        s0, s1 = seg_sample_start[start], seg_sample_start[stop]
        run_counts = counts[start:stop]
        dev = devs[0]
        use_kernel = (
            n_run >= FAST_PATH_MIN_RUN
            and len(devs) == 1
            and dev.formed
            and orientations[0] * seg.level <= -params.v_reset_min
            and seg.duration >= params.t_min
        )
        if use_kernel:
            c0, limit = dev.cycle_count, dev.endurance_limit
            draws = rng.standard_normal(n_run + int(s1 - s0))
            starts = np.concatenate(([0], np.cumsum(run_counts[:-1] + 1)))
            eta_base = _reset_eta_base(params, orientations[0] * seg.level, seg.duration)
            traj = active_backend().reset_pulse_train(
                dev.w, eta_base, params.sigma_c2c, draws[starts]
            )
            dev.w = float(traj[-1])
            dev.cycle_count = c0 + n_run
            dev.degradation = degradation_level(c0 + n_run, limit, params.degradation_steepness)
            if s1 > s0:
                if c0 + n_run <= limit:
                    deg = np.zeros(n_run)
                else:
                    deg = np.array(
                        [
                            degradation_level(c0 + i + 1, limit, params.degradation_steepness)
                            for i in range(n_run)
                        ]
                    )
                w_eff = traj + deg * (params.stuck_w - traj)
                g = params.g_off_median + w_eff * (params.g_on_median - params.g_off_median)
                rtn = 1.0 + dev.rtn_phase * params.rtn_amplitude
                cond = dev.d2d_factor * g * rtn
                mask = np.ones(len(draws), dtype=bool)
                mask[starts] = False
                z = draws[mask]
                currents[s0:s1] = (seg.level * np.repeat(cond, run_counts)) * (1.0 + sigma * z)
            continue
        for local in range(n_run):
            for dev, orient in zip(devs, orientations):
                spec = _classify(dev, params, orient * seg.level, seg.duration)
                apply_pulse(dev, params, spec, rng)
            k = int(run_counts[local])
            if k:
                z = rng.standard_normal((k, len(devs)))
                g = np.array([conductance(d, params) for d in devs])
                contrib = (seg.level * g) * (1.0 + sigma * z)
                lo = seg_sample_start[start + local]
                currents[lo : lo + k] = contrib.sum(axis=1)
    return np.column_stack((times, currents))


def measure_resistance(
    array: MemristorArray,
    routing: AnalogRouting,
    pad: str,
    v_meas: float,
    n_avg: int,
    rng: np.random.Generator,
    sample_interval: float = 1e-6,
) -> float:
    """DC resistance of the single routed device, averaged over ``n_avg`` samples.

    Requires the routing to expose exactly one device across the pad,
    otherwise the reading would be an uninterpretable parallel combination.
    """
    params = array.config.device
    routed = devices_on_pad(routing, array.geometry, pad)
    if len(routed) != 1:
        raise StateError(
            f"resistance needs exactly one device across pad {pad}, found {len(routed)}"
        )
    if v_meas == 0.0:
        raise ParameterError("measurement voltage must be nonzero")
    if abs(v_meas) >= min(params.v_set_min, params.v_reset_min):
        raise ParameterError(f"measurement voltage {v_meas} V is inside the switching range")
    if n_avg < 1:
        raise ParameterError("n_avg must be >= 1")
    waveform = Waveform(
        (WaveformSegment(v_meas, n_avg * sample_interval),), sample_interval
    )
    samples = apply_waveform(array, routing, pad, waveform, rng)
    if len(samples) != n_avg:
        raise InvariantViolation(f"expected {n_avg} samples, collected {len(samples)}")
    return float(v_meas / samples[:, 1].mean())
