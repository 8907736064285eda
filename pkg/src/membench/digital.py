"""Peripheral digital circuits: level shifters and precharge sense amps.

A sense operation is a conductance comparison between the two branches of a
complementary cell, corrupted by a Gaussian input-referred offset.  Feeding a
logic level into the reference selection turns the same comparator into an
XNOR gate: for B = 1 the branches are compared as stored, for B = 0 they are
swapped, so the output is ``stored_bit XNOR B``.

Draw order per sense (fixed, part of the determinism contract): one normal
for the comparator offset, then per branch (BL first) one uniform for the
RTN step and one uniform for the read-disturb lottery.  RTN toggles before
the comparison; disturb lands after it.
"""

from __future__ import annotations

import enum

import numpy as np

from .array import ComplementaryCell
from .device import conductance, _step_rtn, _maybe_disturb
from .errors import ParameterError, StateError
from .params import DeviceParams, SenseConfig, VoltageDomains


class Domain(enum.Enum):
    LOGIC = "logic"
    PROG = "prog"
    FORM = "form"


def domain_voltage(domains: VoltageDomains, domain: Domain) -> float:
    return {
        Domain.LOGIC: domains.v_dd_logic,
        Domain.PROG: domains.v_prog,
        Domain.FORM: domains.v_form,
    }[domain]


def shift_level(logic_level: int, target_voltage: float) -> float:
    """Level shifter: logic 1 maps to the target domain rail, 0 stays at 0."""
    if logic_level not in (0, 1):
        raise ParameterError("logic level must be 0 or 1")
    return target_voltage if logic_level else 0.0


def sense_with_reference(
    cell: ComplementaryCell,
    params: DeviceParams,
    sense_cfg: SenseConfig,
    rng: np.random.Generator,
    logic_input: int | None = None,
) -> tuple[int, int]:
    """One sense, returning (complementary bit, single-ended reference bit).

    The reference bit is what a 1T1R readout of the BL device against the
    fixed ``g_ref`` would have returned in the same trial, sharing the same
    offset draw — the two outputs differ only in the comparison, which is
    what a bit-error-rate comparison between the schemes needs.  The
    reference bit always reflects the stored polarity (it ignores
    ``logic_input``).
    """
    if logic_input not in (None, 0, 1):
        raise ParameterError("logic input must be 0, 1, or None")
    if not cell.formed:
        raise StateError("sense on unformed cell")
    offset = sense_cfg.offset_sigma * rng.standard_normal()
    u_rtn_bl, u_dist_bl = rng.random(), rng.random()
    u_rtn_blb, u_dist_blb = rng.random(), rng.random()
    _step_rtn(cell.dev_bl, params, u_rtn_bl)
    _step_rtn(cell.dev_blb, params, u_rtn_blb)
    g_bl = conductance(cell.dev_bl, params)
    g_blb = conductance(cell.dev_blb, params)
    if logic_input == 0:
        bit = int(g_blb + offset > g_bl)
    else:
        bit = int(g_bl + offset > g_blb)
    ref_bit = int(g_bl + offset > sense_cfg.g_ref)
    _maybe_disturb(cell.dev_bl, params, u_dist_bl)
    _maybe_disturb(cell.dev_blb, params, u_dist_blb)
    return bit, ref_bit


def sense(
    cell: ComplementaryCell,
    params: DeviceParams,
    sense_cfg: SenseConfig,
    rng: np.random.Generator,
    logic_input: int | None = None,
) -> int:
    """Sense the cell; with ``logic_input`` set, computes stored XNOR input."""
    bit, _ = sense_with_reference(cell, params, sense_cfg, rng, logic_input)
    return bit
