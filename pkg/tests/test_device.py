"""Device compact-model tests: frozen oracles, invariants, stream discipline."""

import math

import numpy as np
import pytest

from membench.device import (
    MemristorState,
    PulseKind,
    PulseSpec,
    apply_pulse,
    apply_reset_train,
    conductance,
    degradation_level,
    effective_w,
    read,
    resistance,
    sample_endurance_limit,
    sample_fresh_device,
)
from membench.errors import ParameterError, StateError


def formed_device(params, rng, w=1.0):
    dev = sample_fresh_device(params, rng)
    dev.formed = True
    dev.w = w
    return dev


# -- sampling ---------------------------------------------------------------


def test_zero_variance_d2d_factor(config, rng):
    params = config.device.noiseless()
    dev = sample_fresh_device(params, rng)
    assert dev.d2d_factor == 1.0


def test_sampling_is_deterministic(config):
    a = sample_fresh_device(config.device, np.random.default_rng(42))
    b = sample_fresh_device(config.device, np.random.default_rng(42))
    assert (a.d2d_factor, a.endurance_limit) == (b.d2d_factor, b.endurance_limit)
    assert a.w == b.w == 0.0 and not a.formed


def test_endurance_limits_cover_the_documented_range(config, rng):
    # 1e4 samples at the default model stay inside [1e3, 1e9]
    limits = np.array(
        [sample_endurance_limit(config.device, rng) for _ in range(10_000)]
    )
    assert limits.min() >= 1_000
    assert limits.max() <= 1_000_000_000


def test_endurance_median_falls_with_overdrive(config):
    rng = np.random.default_rng(9)
    soft = [sample_endurance_limit(config.device, rng, v_prog=2.2) for _ in range(500)]
    hard = [sample_endurance_limit(config.device, rng, v_prog=3.0) for _ in range(500)]
    assert np.median(hard) < np.median(soft)


# -- conductance map ----------------------------------------------------------


def test_conductance_boundaries(config, rng):
    params = config.device.noiseless()
    dev = formed_device(params, rng, w=1.0)
    assert conductance(dev, params) == pytest.approx(params.g_on_median, rel=1e-12)
    dev.w = 0.0
    assert conductance(dev, params) == pytest.approx(params.g_off_median, rel=1e-12)
    assert resistance(dev, params) == pytest.approx(1.0 / params.g_off_median, rel=1e-12)


def test_unformed_conductance_is_below_hrs(config, rng):
    params = config.device.noiseless()
    dev = sample_fresh_device(params, rng)
    assert conductance(dev, params) < params.g_off_median


def test_full_degradation_collapses_the_window(config, rng):
    # window at degradation=1 shrinks below 10% of the fresh window,
    # checked across the whole w grid
    params = config.device.noiseless()
    dev = formed_device(params, rng)
    dev.degradation = 1.0
    gs = []
    for w in np.linspace(0.0, 1.0, 21):
        dev.w = float(w)
        gs.append(conductance(dev, params))
    window = max(gs) - min(gs)
    assert window < 0.1 * (params.g_on_median - params.g_off_median)


def test_effective_w_moves_toward_stuck_point(config, rng):
    params = config.device.noiseless()
    dev = formed_device(params, rng, w=1.0)
    last = effective_w(dev, params)
    for d in (0.25, 0.5, 0.75, 1.0):
        dev.degradation = d
        cur = effective_w(dev, params)
        assert params.stuck_w <= cur <= last
        last = cur
    assert last == pytest.approx(params.stuck_w)


def test_degradation_ramp_shape():
    limit = 10**5
    assert degradation_level(limit, limit, 12.0) == 0.0
    assert degradation_level(limit - 1, limit, 12.0) == 0.0
    mid = degradation_level(round(limit * 10**0.5), limit, 12.0)
    assert mid == pytest.approx(0.5, abs=1e-3)
    assert degradation_level(10 * limit, limit, 12.0) > 0.99


# -- reads --------------------------------------------------------------------


def test_read_at_zero_volts_is_zero_current(config, rng):
    dev = formed_device(config.device, rng)
    assert read(dev, config.device, 0.0, rng) == 0.0


def test_read_ohm_product(config, rng):
    params = config.device.noiseless()
    dev = formed_device(params, rng, w=1.0)
    current = read(dev, params, 0.2, rng)
    assert current == pytest.approx(0.2 * params.g_on_median, rel=1e-12)


def test_read_rejects_switching_level_bias(config, rng):
    dev = formed_device(config.device, rng)
    with pytest.raises(ParameterError):
        read(dev, config.device, 0.9, rng)
    with pytest.raises(ParameterError):
        read(dev, config.device, -1.2, rng)


def test_read_disturb_binomial_oracle(config):
    # frozen oracle: rate 0.01 over 1e4 reads -> 100 +/- 30 events (3 sigma)
    import dataclasses

    params = dataclasses.replace(config.device.noiseless(), disturb_rate=0.01)
    rng = np.random.default_rng(77)
    dev = formed_device(params, rng, w=0.05)
    w0 = dev.w
    for _ in range(10_000):
        read(dev, params, 0.2, rng)
    events = round((dev.w - w0) / params.disturb_step)
    assert 70 <= events <= 130


def test_read_leaves_unformed_device_alone(config, rng):
    params = config.device
    dev = sample_fresh_device(params, rng)
    w0, formed0 = dev.w, dev.formed
    for _ in range(200):
        read(dev, params, 0.2, rng)
    assert dev.w == w0 and dev.formed == formed0


# -- pulses -------------------------------------------------------------------


def test_pulse_spec_validates_width():
    with pytest.raises(ParameterError):
        PulseSpec(1.0, 0.0, PulseKind.SET)
    with pytest.raises(ParameterError):
        PulseSpec(1.0, -1e-6, PulseKind.READ)


def test_forming_state_machine(config, rng):
    params = config.device
    dev = sample_fresh_device(params, rng)
    form = PulseSpec(3.3, 1e-5, PulseKind.FORM)
    with pytest.raises(StateError):
        apply_pulse(dev, params, PulseSpec(2.2, 1e-6, PulseKind.SET), rng)
    report = apply_pulse(dev, params, form, rng)
    assert report.switched and dev.formed
    with pytest.raises(StateError):
        apply_pulse(dev, params, form, rng)


def test_sub_threshold_pulses_are_inert_but_draw(config):
    # stream layout is fixed: an ineffective pulse consumes its draw anyway
    params = config.device
    rng = np.random.default_rng(3)
    dev = formed_device(params, rng, w=0.7)
    before = dev.w
    apply_pulse(dev, params, PulseSpec(1.0, 1e-6, PulseKind.SET), rng)  # below v_set_min
    apply_pulse(dev, params, PulseSpec(-2.2, 1e-8, PulseKind.RESET), rng)  # below t_min
    assert dev.w == before and dev.cycle_count == 0
    twin = np.random.default_rng(3)
    twin.standard_normal()  # device sampling: d2d
    twin.standard_normal()  # device sampling: endurance
    twin.standard_normal(2)  # the two inert pulses
    assert rng.bit_generator.state == twin.bit_generator.state


def test_strong_reset_noise_off_lands_exactly_on_hrs(config, rng):
    params = config.device.noiseless()
    dev = formed_device(params, rng, w=1.0)
    apply_pulse(dev, params, PulseSpec(-2.5, 1e-6, PulseKind.RESET), rng)
    assert dev.w == 0.0
    assert conductance(dev, params) == params.g_off_median


def test_strong_reset_monte_carlo_mean(config):
    # 1e3 noisy trials: empirical mean conductance within 3 sigma of g_off
    params = config.device
    rng = np.random.default_rng(15)
    gs = []
    for _ in range(1000):
        dev = formed_device(params, rng, w=1.0)
        apply_pulse(dev, params, PulseSpec(-2.5, 1e-6, PulseKind.RESET), rng)
        gs.append(conductance(dev, params))
    gs = np.array(gs)
    assert abs(gs.mean() - params.g_off_median) <= 3 * gs.std()


def test_weak_reset_train_is_progressive(config, rng):
    # device-level twin of the 15k-pulse recipe, noise off
    params = config.device.noiseless()
    dev = formed_device(params, rng, w=1.0)
    r_first = resistance(dev, params)
    pulse = PulseSpec(-1.0, 1.5e-6, PulseKind.RESET)
    traj = apply_reset_train(dev, params, pulse, 15_000, rng)
    assert np.all(np.diff(traj) < 0)  # strictly decaying filament
    assert resistance(dev, params) >= 2 * r_first


def test_reset_train_equals_scalar_loop(config):
    params = config.device
    pulse = PulseSpec(-1.0, 1.5e-6, PulseKind.RESET)

    rng_a = np.random.default_rng(8)
    dev_a = formed_device(params, rng_a, w=0.9)
    traj = apply_reset_train(dev_a, params, pulse, 500, rng_a)

    rng_b = np.random.default_rng(8)
    dev_b = formed_device(params, rng_b, w=0.9)
    ws = []
    for _ in range(500):
        apply_pulse(dev_b, params, pulse, rng_b)
        ws.append(dev_b.w)

    assert np.array_equal(np.asarray(traj), np.array(ws))
    assert dev_a.w == dev_b.w
    assert dev_a.cycle_count == dev_b.cycle_count == 500
    assert dev_a.degradation == dev_b.degradation
    assert rng_a.bit_generator.state == rng_b.bit_generator.state


def test_set_redraws_filament_independent_of_history(config):
    params = config.device
    rng = np.random.default_rng(5)
    hi = formed_device(params, rng, w=1.0)
    lo = formed_device(params, rng, w=0.01)
    state = rng.bit_generator.state
    apply_pulse(hi, params, PulseSpec(2.2, 1e-6, PulseKind.SET), rng)
    rng.bit_generator.state = state
    apply_pulse(lo, params, PulseSpec(2.2, 1e-6, PulseKind.SET), rng)
    assert hi.w == lo.w  # same draw, same outcome: SET is memoryless


def test_wearout_only_shows_at_readout(config, rng):
    # writes keep landing on target while the readout window collapses
    params = config.device.noiseless()
    dev = formed_device(params, rng, w=1.0)
    dev.endurance_limit = 10
    for _ in range(400):
        apply_pulse(dev, params, PulseSpec(2.2, 1e-6, PulseKind.SET), rng)
    assert dev.w == 1.0
    assert dev.degradation > 0.99
    assert abs(conductance(dev, params) - conductance(dev, params)) == 0.0
    g_mid = params.g_off_median + params.stuck_w * (params.g_on_median - params.g_off_median)
    assert conductance(dev, params) == pytest.approx(g_mid, rel=1e-4)
