"""Sense amplifier and level shifter tests, including the XNOR contract."""

import numpy as np
import pytest

from membench.array import CellAddress, MemristorArray
from membench.digital import Domain, domain_voltage, sense, sense_with_reference, shift_level
from membench.errors import ParameterError, StateError
from membench.params import apply_overrides, default_config


def pair(config, seed=0, bit=1):
    arr = MemristorArray(config, np.random.default_rng(seed))
    addr = CellAddress(0, 0)
    arr.form_cell(addr)
    arr.write_bit(addr, bit)
    return arr, arr.cell(addr)


# -- level shifting -------------------------------------------------------------


def test_shift_level_examples():
    assert shift_level(1, 2.4) == 2.4
    assert shift_level(0, 2.4) == 0.0
    assert shift_level(1, 3.3) == 3.3
    assert shift_level(0, 999.0) == 0.0


def test_shift_level_rejects_non_bits():
    with pytest.raises(ParameterError):
        shift_level(2, 2.2)


def test_domain_voltages(config):
    assert domain_voltage(config.domains, Domain.LOGIC) == 1.2
    assert domain_voltage(config.domains, Domain.PROG) == 2.2
    assert domain_voltage(config.domains, Domain.FORM) == 3.3


# -- sensing ---------------------------------------------------------------------


def test_plain_sense_noise_off(quiet_config, rng):
    _, cell = pair(quiet_config, bit=1)
    assert sense(cell, quiet_config.device, quiet_config.sense, rng) == 1
    _, cell = pair(quiet_config, bit=0)
    assert sense(cell, quiet_config.device, quiet_config.sense, rng) == 0


def test_xnor_truth_table_exact(quiet_config, rng):
    table = {}
    for stored in (0, 1):
        _, cell = pair(quiet_config, bit=stored)
        for b in (0, 1):
            table[(stored, b)] = sense(
                cell, quiet_config.device, quiet_config.sense, rng, logic_input=b
            )
    assert table == {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1}


def test_sense_requires_formed_cell(config, rng):
    arr = MemristorArray(config, np.random.default_rng(0))
    with pytest.raises(StateError):
        sense(arr.cell(CellAddress(0, 0)), config.device, config.sense, rng)


def test_sense_validates_logic_input(quiet_config, rng):
    _, cell = pair(quiet_config)
    with pytest.raises(ParameterError):
        sense(cell, quiet_config.device, quiet_config.sense, rng, logic_input=2)


def test_sense_consumes_a_fixed_draw_budget(config):
    # one normal (offset) + four uniforms (per-branch RTN and disturb), always
    arr, cell = pair(config, seed=5)
    state = arr.rng.bit_generator.state
    sense(cell, config.device, config.sense, arr.rng)
    twin = np.random.default_rng()
    twin.bit_generator.state = state
    twin.standard_normal()
    twin.random(4)
    assert arr.rng.bit_generator.state == twin.bit_generator.state


def test_disturb_lands_after_the_comparison(rng):
    # disturb_rate=1 with a huge step: the decision in each sense reflects
    # the state before that sense's disturb, so the flip shows one read late
    cfg = apply_overrides(
        default_config(),
        {
            "device.sigma_d2d": 0.0,
            "device.sigma_c2c": 0.0,
            "device.rtn_amplitude": 0.0,
            "device.read_noise_sigma": 0.0,
            "sense.offset_sigma": 0.0,
            "device.disturb_rate": 1.0,
            "device.disturb_step": 0.5,
        },
    )
    _, cell = pair(cfg, bit=1)  # bl at w=1, blb at w=0
    outs = [sense(cell, cfg.device, cfg.sense, rng) for _ in range(3)]
    # blb climbs 0 -> 0.5 -> 1.0 after each read; the tie reads as 0
    assert outs == [1, 1, 0]


def test_collapsed_window_is_a_coin_flip(config):
    # with matched branches (no d2d) and full degradation both sides sit at
    # the stuck point: 1e4 senses land within 0.5 +/- 0.05
    cfg = apply_overrides(default_config(), {"device.sigma_d2d": 0.0})
    arr, cell = pair(cfg, seed=8, bit=1)
    cell.dev_bl.degradation = 1.0
    cell.dev_blb.degradation = 1.0
    hits = sum(sense(cell, cfg.device, cfg.sense, arr.rng) for _ in range(10_000))
    assert abs(hits / 10_000 - 0.5) <= 0.05


def test_reference_bit_shares_the_trial(quiet_config, rng):
    _, cell = pair(quiet_config, bit=1)
    bit, ref = sense_with_reference(cell, quiet_config.device, quiet_config.sense, rng)
    assert (bit, ref) == (1, 1)
    _, cell = pair(quiet_config, bit=0)
    bit, ref = sense_with_reference(cell, quiet_config.device, quiet_config.sense, rng)
    assert (bit, ref) == (0, 0)


def test_paired_reference_errors_dominate(config):
    # stress the comparator offset: the single-ended margin (to g_ref) is a
    # fraction of the complementary margin, so its errors strictly contain
    # the complementary ones in every paired trial
    cfg = apply_overrides(default_config(), {"sense.offset_sigma": 1.5e-5})
    arr, cell = pair(cfg, seed=31, bit=0)  # stored 0: the tight single-ended margin
    err2 = err1 = 0
    for _ in range(2000):
        bit, ref = sense_with_reference(cell, cfg.device, cfg.sense, arr.rng)
        err2 += bit != 0
        err1 += ref != 0
    assert err2 <= err1
    assert err1 > 0
