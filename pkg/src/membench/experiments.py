"""Canned bench experiments: pure functions of (config, seed) returning CSV.

Each recipe builds a fresh chip from the given seed, drives it through the
public chip operations only, and renders its results as a CSV string, so a
run is reproducible from its config snapshot and seed alone.  ``write_run``
adds the on-disk layout: ``<out>/<experiment>/<timestamp>/results.csv`` next
to a ``config.snapshot`` recording the effective configuration, seed, and
knobs.
"""

from __future__ import annotations

import csv
import datetime
import inspect
import io
from pathlib import Path

import numpy as np

from .analog import Waveform, WaveformSegment, single_device_routing
from .array import SIDE_BY_NAME
from .chip import Chip, ChipMode
from .device import sample_fresh_device
from .errors import ParameterError
from .params import ChipConfig, dump_config


def _csv_writer():
    buf = io.StringIO()
    return buf, csv.writer(buf, lineterminator="\n")


def _side_index(side) -> int:
    if side in (0, 1):
        return int(side)
    try:
        return SIDE_BY_NAME[side]
    except (KeyError, TypeError):
        raise ParameterError(f"side must be 0/1 or 'bl'/'blb', got {side!r}") from None


def progressive_reset(
    config: ChipConfig,
    seed: int,
    n_pulses: int = 15000,
    amplitude: float = 1.0,
    width: float = 1.5e-6,
    read_every: int = 100,
    row: int = 0,
    col: int = 0,
    side="bl",
) -> str:
    """Resistance versus identical weak RESET pulses on one device.

    Routes a single device to pad B through the analog mux, forms and sets it
    with a prep waveform, records a baseline resistance, then fires
    ``n_pulses`` pulses of ``-amplitude`` volts and ``width`` seconds with one
    current sample after each pulse.  Reports the baseline (pulse 0) and every
    ``read_every``-th pulse, always including the final one.
    """
    if n_pulses < 0:
        raise ParameterError("n_pulses must be >= 0")
    if read_every < 1:
        raise ParameterError("read_every must be >= 1")
    if amplitude <= 0:
        raise ParameterError("amplitude is the pulse magnitude; must be positive")
    chip = Chip(config, seed)
    chip.set_mode(ChipMode.ANALOG)
    chip.set_routing(single_device_routing(config.geometry, row, col, _side_index(side), "B"))
    prep = Waveform(
        (
            WaveformSegment(config.forming.form_voltage, config.forming.pulse_width),
            WaveformSegment(config.programming.set_voltage, config.programming.pulse_width),
        ),
        sample_interval=config.forming.pulse_width + config.programming.pulse_width,
    )
    chip.apply_waveform("B", prep)
    v_read = config.device.read_voltage
    baseline = chip.apply_waveform("B", Waveform((WaveformSegment(v_read, width),), width))
    r0 = v_read / float(baseline[0, 1])

    buf, writer = _csv_writer()
    writer.writerow(["pulse_index", "resistance_ohm"])
    writer.writerow([0, repr(r0)])
    if n_pulses:
        train = Waveform((WaveformSegment(-amplitude, width),) * n_pulses, width)
        samples = chip.apply_waveform("B", train)
        picks = list(range(read_every, n_pulses + 1, read_every))
        if not picks or picks[-1] != n_pulses:
            picks.append(n_pulses)
        for k in picks:
            r_k = -amplitude / float(samples[k - 1, 1])
            writer.writerow([k, repr(r_k)])
    return buf.getvalue()


def endurance(
    config: ChipConfig,
    seed: int,
    max_cycles: int = 1_000_000,
    points_per_decade: int = 10,
    probe_reads: int = 100,
    n_avg: int = 8,
    row: int = 0,
    col: int = 0,
    compress: bool = True,
) -> str:
    """Cycle one cell with alternating writes and track window plus errors.

    At log-spaced checkpoints the run pauses, measures both branch
    resistances through the analog pads, switches back to digital mode and
    probes ``probe_reads`` sense operations split across both stored
    polarities (half at the bit the cycling left behind, half after writing
    its complement), so the reported error rate is polarity-balanced.
    ``compress`` selects the statistically equivalent batched cycling (the
    sequential path replays every write through the kernel backend).
    """
    if max_cycles < 1:
        raise ParameterError("max_cycles must be >= 1")
    if points_per_decade < 1:
        raise ParameterError("points_per_decade must be >= 1")
    if probe_reads < 2:
        raise ParameterError("probe_reads must be >= 2")
    chip = Chip(config, seed)
    chip.form_cell(row, col)

    checkpoints: list[int] = []
    j = 0
    while True:
        c = round(10 ** (j / points_per_decade))
        if c > max_cycles:
            break
        if not checkpoints or c > checkpoints[-1]:
            checkpoints.append(c)
        j += 1
    if checkpoints[-1] != max_cycles:
        checkpoints.append(max_cycles)

    v_read = config.device.read_voltage
    geom = config.geometry
    buf, writer = _csv_writer()
    writer.writerow(["cycle", "r_lrs_ohm", "r_hrs_ohm", "ber"])
    stored = None  # nothing written yet; cycling starts on bit 1
    done = 0
    for cp in checkpoints:
        pending = cp - done
        if pending:
            first_bit = 1 if stored is None else 1 - stored
            if compress:
                chip.cycle_cell_batched(row, col, pending, first_bit)
            else:
                chip.cycle_cell(row, col, pending, first_bit)
            stored = first_bit ^ ((pending - 1) & 1)
            done = cp

        chip.set_mode(ChipMode.ANALOG)
        r_by_side = []
        for side in (0, 1):
            chip.set_routing(single_device_routing(geom, row, col, side, "B"))
            r_by_side.append(chip.measure_resistance("B", v_read, n_avg))
        chip.set_mode(ChipMode.DIGITAL)
        r_lrs, r_hrs = (r_by_side[0], r_by_side[1]) if stored else (r_by_side[1], r_by_side[0])

        errors = 0
        for _ in range(probe_reads - probe_reads // 2):
            errors += chip.read_bit(row, col) != stored
        # flip the stored polarity (one extra cycle) and probe the other half
        chip.write_bit(row, col, 1 - stored)
        stored = 1 - stored
        done += 1
        for _ in range(probe_reads // 2):
            errors += chip.read_bit(row, col) != stored
        writer.writerow([cp, repr(r_lrs), repr(r_hrs), repr(errors / probe_reads)])
    return buf.getvalue()


def endurance_vs_conditions(
    config: ChipConfig,
    seed: int,
    v_start: float = 2.2,
    v_stop: float = 3.0,
    v_points: int = 5,
    width: float = 1e-6,
    devices_per_profile: int = 20,
) -> str:
    """Median endurance budget across a programming-voltage sweep.

    Samples fresh devices per profile and reports the median of their
    endurance budgets; harder programming conditions trade retention window
    for lifetime, so the median falls as the voltage rises.
    """
    if v_points < 1:
        raise ParameterError("v_points must be >= 1")
    if devices_per_profile < 1:
        raise ParameterError("devices_per_profile must be >= 1")
    rng = np.random.default_rng(seed)
    grid = np.linspace(v_start, v_stop, v_points)
    buf, writer = _csv_writer()
    writer.writerow(["v_prog", "t_prog_s", "median_endurance_cycles"])
    for v in grid:
        limits = [
            sample_fresh_device(config.device, rng, v_prog=float(v)).endurance_limit
            for _ in range(devices_per_profile)
        ]
        writer.writerow([repr(float(v)), repr(width), repr(float(np.median(limits)))])
    return buf.getvalue()


def ber_map(
    config: ChipConfig,
    seed: int,
    pattern: str = "checkerboard",
    n_reads: int = 10,
) -> str:
    """Per-cell read-error counts over the full array, 2T2R versus 1T1R.

    Forms every cell, writes the pattern, then senses each cell ``n_reads``
    times recording both the complementary decision and the single-ended
    reference decision from the same trials.
    """
    if n_reads < 1:
        raise ParameterError("n_reads must be >= 1")
    chip = Chip(config, seed)
    geom = config.geometry
    if pattern == "checkerboard":
        bit_at = lambda r, c: (r + c) % 2
    elif pattern == "ones":
        bit_at = lambda r, c: 1
    elif pattern == "zeros":
        bit_at = lambda r, c: 0
    elif pattern == "random":
        bits = chip.rng.integers(0, 2, size=(geom.rows, geom.cell_cols))
        bit_at = lambda r, c: int(bits[r, c])
    else:
        raise ParameterError(f"unknown pattern {pattern!r}")
    chip.form_all()
    for r in range(geom.rows):
        for c in range(geom.cell_cols):
            chip.write_bit(r, c, bit_at(r, c))
    errors = np.zeros((geom.rows, geom.cell_cols), dtype=int)
    ref_errors = np.zeros_like(errors)
    for _ in range(n_reads):
        for r in range(geom.rows):
            for c in range(geom.cell_cols):
                b, ref = chip.read_bit_with_reference(r, c)
                expect = bit_at(r, c)
                errors[r, c] += b != expect
                ref_errors[r, c] += ref != expect
    buf, writer = _csv_writer()
    writer.writerow(["row", "col", "errors", "trials", "ref_errors", "ref_trials"])
    for r in range(geom.rows):
        for c in range(geom.cell_cols):
            writer.writerow([r, c, int(errors[r, c]), n_reads, int(ref_errors[r, c]), n_reads])
    return buf.getvalue()


EXPERIMENTS = {
    "progressive_reset": progressive_reset,
    "endurance": endurance,
    "endurance_vs_conditions": endurance_vs_conditions,
    "ber_map": ber_map,
}


def coerce_knob(value: str):
    """CLI/protocol knob values: int if it parses, else float, else string."""
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def run_experiment(name: str, config: ChipConfig, seed: int, /, **knobs) -> str:
    try:
        func = EXPERIMENTS[name]
    except KeyError:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ParameterError(f"unknown experiment {name!r} (known: {known})") from None
    sig = inspect.signature(func)
    for key in knobs:
        if key not in sig.parameters or key in ("config", "seed"):
            raise ParameterError(f"unknown knob {key!r} for experiment {name!r}")
    return func(config, seed, **knobs)


def write_run(
    name: str, config: ChipConfig, seed: int, out_dir, knobs: dict | None = None
) -> Path:
    """Run an experiment and persist results plus provenance; returns the dir."""
    knobs = knobs or {}
    results = run_experiment(name, config, seed, **knobs)
    stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%S.%fZ")
    run_dir = Path(out_dir) / name / stamp
    n = 1
    while run_dir.exists():
        run_dir = Path(out_dir) / name / f"{stamp}-{n}"
        n += 1
    run_dir.mkdir(parents=True)
    (run_dir / "results.csv").write_text(results, encoding="utf-8")
    snapshot_lines = [dump_config(config).rstrip("\n"), f"# experiment = {name}", f"# seed = {seed}"]
    for key in sorted(knobs):
        snapshot_lines.append(f"# knob {key} = {knobs[key]!r}")
    (run_dir / "config.snapshot").write_text("\n".join(snapshot_lines) + "\n", encoding="utf-8")
    return run_dir
