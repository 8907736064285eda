"""Stochastic behavioral model of one HfO2 memristor.

State is a filament strength ``w`` in [0, 1] mapped linearly onto the
conductance window.  SET and FORM redraw ``w`` near 1 with cycle-to-cycle
spread; RESET decays it multiplicatively, so weak pulses are progressive and
strong pulses are abrupt.  Once the per-device cycle budget is exceeded the
memory window collapses toward ``stuck_w`` (HRS resistance drifts down), which
is what eventually produces sense bit errors.

RNG discipline (load-bearing for the batched kernels and for replay):

* every FORM/SET/RESET pulse consumes exactly one standard normal, even when
  sub-threshold or noise-free;
* every read consumes one uniform (RTN step), one uniform (disturb lottery)
  and, for current reads, one standard normal (read noise), in that order;
* all transcendental state math goes through ``math.exp``/``math.log10``
  (libm) so the compiled and pure-Python kernels stay bit-identical.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .backends import active_backend
from .errors import ParameterError, StateError
from .params import DeviceParams, EnduranceModel


class PulseKind(enum.Enum):
    FORM = "form"
    SET = "set"
    RESET = "reset"
    READ = "read"


@dataclass(frozen=True)
class PulseSpec:
    """One voltage pulse: amplitude (V, sign = polarity), width (s), class."""

    amplitude: float
    width: float
    kind: PulseKind

    def __post_init__(self):
        if self.width <= 0:
            raise ParameterError("pulse width must be > 0")


@dataclass
class MemristorState:
    """Mutable per-device state; plain value, callers serialize access."""

    formed: bool = False
    w: float = 0.0
    d2d_factor: float = 1.0
    cycle_count: int = 0
    endurance_limit: int = 10**9
    degradation: float = 0.0
    rtn_phase: int = 1  # +1 or -1, two-level telegraph state


@dataclass(frozen=True)
class ApplyReport:
    switched: bool
    cycle_consumed: bool


def sample_endurance_limit(
    params: DeviceParams, rng: np.random.Generator, v_prog: float | None = None
) -> int:
    """Draw one device's cycle budget for the given programming voltage.

    Always consumes exactly one standard normal.
    """
    em: EnduranceModel = params.endurance
    z = rng.standard_normal()
    if v_prog is None:
        v_prog = em.vref
    decades = (
        em.log10_endurance_at_vref
        + em.endurance_voltage_slope * (v_prog - em.vref)
        + em.spread_decades * z
    )
    decades = min(EnduranceModel.MAX_DECADES, max(EnduranceModel.MIN_DECADES, decades))
    return round(10.0**decades)


def sample_fresh_device(
    params: DeviceParams, rng: np.random.Generator, v_prog: float | None = None
) -> MemristorState:
    """Instantiate an unformed device with frozen device-to-device factors.

    Consumes two standard normals (d2d factor, endurance budget).  The
    endurance budget is sampled at ``v_prog`` (defaults to the endurance
    model's reference programming voltage).
    """
    params.validate()
    z_d2d = rng.standard_normal()
    d2d = math.exp(params.sigma_d2d * z_d2d)
    limit = sample_endurance_limit(params, rng, v_prog)
    return MemristorState(d2d_factor=d2d, endurance_limit=limit)


def degradation_level(cycle_count: int, endurance_limit: int, steepness: float) -> float:
    """Logistic wear-out ramp over one decade of cycles past the budget."""
    if cycle_count <= endurance_limit:
        return 0.0
    x = math.log10(cycle_count / endurance_limit)
    return 1.0 / (1.0 + math.exp(-steepness * (x - 0.5)))


def effective_w(state: MemristorState, params: DeviceParams) -> float:
    """Filament strength seen by the readout, window-collapsed by wear."""
    return state.w + state.degradation * (params.stuck_w - state.w)


def conductance(state: MemristorState, params: DeviceParams) -> float:
    """Instantaneous conductance in siemens (no read noise)."""
    if not state.formed:
        # pristine stack, deeper than programmed HRS
        return 0.1 * params.g_off_median * state.d2d_factor
    w_eff = effective_w(state, params)
    g = params.g_off_median + w_eff * (params.g_on_median - params.g_off_median)
    rtn = 1.0 + state.rtn_phase * params.rtn_amplitude
    return state.d2d_factor * g * rtn


def resistance(state: MemristorState, params: DeviceParams) -> float:
    return 1.0 / conductance(state, params)


def _reset_eta_base(params: DeviceParams, amplitude: float, width: float) -> float:
    """Per-pulse decay coefficient before cycle-to-cycle jitter and clamping."""
    overdrive = abs(amplitude) - params.v_reset_min
    return (
        params.reset_step_gain
        * math.exp(params.reset_beta * (overdrive - params.reset_od_ref))
        * (width / params.reset_width_ref)
    )


def _target_w(sigma_c2c: float, z: float) -> float:
    """Post-SET/FORM filament strength: lognormal clipped at 1."""
    w = math.exp(sigma_c2c * z)
    return 1.0 if w > 1.0 else w


def _consume_cycle(state: MemristorState, params: DeviceParams) -> None:
    state.cycle_count += 1
    state.degradation = degradation_level(
        state.cycle_count, state.endurance_limit, params.degradation_steepness
    )


def _step_rtn(state: MemristorState, params: DeviceParams, u: float) -> None:
    """Two-level RTN as a symmetric Markov chain: toggle with fixed probability."""
    if u < params.rtn_switch_prob:
        state.rtn_phase = -state.rtn_phase


def _maybe_disturb(state: MemristorState, params: DeviceParams, u: float) -> None:
    """Read-disturb lottery: a rare partial-SET nudge on formed devices."""
    if state.formed and u < params.disturb_rate:
        state.w = min(1.0, state.w + params.disturb_step)


def _read_side_effects(state: MemristorState, params: DeviceParams, rng) -> None:
    """RTN Markov step plus the read-disturb lottery (two uniform draws)."""
    u_rtn = rng.random()
    u_disturb = rng.random()
    _step_rtn(state, params, u_rtn)
    _maybe_disturb(state, params, u_disturb)


def apply_pulse(
    state: MemristorState, params: DeviceParams, pulse: PulseSpec, rng: np.random.Generator
) -> ApplyReport:
    """Apply one pulse in place and report whether it programmed the device.

    Sub-threshold FORM/SET/RESET pulses leave (w, formed, cycle_count)
    untouched but still consume their normal draw, so pulse trains keep a
    fixed stream layout.
    """
    kind = pulse.kind
    if kind is PulseKind.READ:
        _read_side_effects(state, params, rng)
        return ApplyReport(switched=False, cycle_consumed=False)

    if kind is PulseKind.FORM and state.formed:
        raise StateError("device already formed")
    if kind in (PulseKind.SET, PulseKind.RESET) and not state.formed:
        raise StateError("device not formed")

    z = rng.standard_normal()
    wide_enough = pulse.width >= params.t_min

    if kind is PulseKind.FORM:
        if pulse.amplitude >= params.v_form_min and wide_enough:
            state.formed = True
            state.w = _target_w(params.sigma_c2c, z)
            return ApplyReport(switched=True, cycle_consumed=False)
        return ApplyReport(switched=False, cycle_consumed=False)

    if kind is PulseKind.SET:
        if pulse.amplitude >= params.v_set_min and wide_enough:
            state.w = _target_w(params.sigma_c2c, z)
            _consume_cycle(state, params)
            return ApplyReport(switched=True, cycle_consumed=True)
        return ApplyReport(switched=False, cycle_consumed=False)

    # RESET: polarity is carried by the sign, magnitude sets the overdrive
    if abs(pulse.amplitude) >= params.v_reset_min and wide_enough:
        eta = _reset_eta_base(params, pulse.amplitude, pulse.width) * math.exp(
            params.sigma_c2c * z
        )
        if eta > 1.0:
            eta = 1.0
        state.w *= 1.0 - eta
        _consume_cycle(state, params)
        return ApplyReport(switched=True, cycle_consumed=True)
    return ApplyReport(switched=False, cycle_consumed=False)


def apply_reset_train(
    state: MemristorState,
    params: DeviceParams,
    pulse: PulseSpec,
    n_pulses: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Apply ``n_pulses`` identical RESET pulses via the kernel backend.

    Exactly equivalent (bit-for-bit, including RNG consumption) to calling
    :func:`apply_pulse` ``n_pulses`` times.  Returns the filament strength
    after each pulse.
    """
    if pulse.kind is not PulseKind.RESET:
        raise ParameterError("train application only supports RESET pulses")
    if not state.formed:
        raise StateError("device not formed")
    if n_pulses == 0:
        return np.empty(0)
    z = rng.standard_normal(n_pulses)
    if abs(pulse.amplitude) >= params.v_reset_min and pulse.width >= params.t_min:
        eta_base = _reset_eta_base(params, pulse.amplitude, pulse.width)
        traj = active_backend().reset_pulse_train(state.w, eta_base, params.sigma_c2c, z)
        state.w = float(traj[-1])
        state.cycle_count += n_pulses
        state.degradation = degradation_level(
            state.cycle_count, state.endurance_limit, params.degradation_steepness
        )
    else:
        # sub-threshold: draws consumed, nothing moves
        traj = np.full(n_pulses, state.w)
    return traj


def read(
    state: MemristorState, params: DeviceParams, v_read: float, rng: np.random.Generator
) -> float:
    """One noisy current read; steps RTN and may disturb the filament."""
    if abs(v_read) >= min(params.v_set_min, params.v_reset_min):
        raise ParameterError(
            f"read voltage {v_read} V is inside the switching range"
        )
    u_rtn = rng.random()
    u_disturb = rng.random()
    z = rng.standard_normal()
    _step_rtn(state, params, u_rtn)
    current = conductance(state, params) * v_read * (1.0 + params.read_noise_sigma * z)
    _maybe_disturb(state, params, u_disturb)
    return current
