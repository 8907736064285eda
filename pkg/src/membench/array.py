"""The 8,192-device array organized as complementary 2T2R cells.

Digital operations are modeled as phases: each phase is a static assignment
of word-line gates, bit-line levels, and source-line levels.  A device sees
stress only when its word line is gated on (the access transistors isolate
everything else); stress is ``V(bit line) - V(source line)``, positive in the
SET/FORM direction.  Writes use the classic shared-source scheme: the SET
phase drives the target bit line, the RESET phase drives the row's source
line and inhibits every other bit line at the same level.

Every phase is checked before application: any gated device that is not a
phase target must sit below both switching thresholds, otherwise the
operation aborts with :class:`InvariantViolation`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .device import (
    MemristorState,
    PulseKind,
    PulseSpec,
    ApplyReport,
    _reset_eta_base,
    _target_w,
    apply_pulse,
    degradation_level,
    sample_fresh_device,
)
from .backends import active_backend
from .errors import AddressError, InvariantViolation, ParameterError, StateError
from .params import ArrayGeometry, ChipConfig, FormingProfile, ProgrammingProfile

BL_SIDE = 0
BLB_SIDE = 1
SIDE_NAMES = {BL_SIDE: "bl", BLB_SIDE: "blb"}
SIDE_BY_NAME = {v: k for k, v in SIDE_NAMES.items()}


@dataclass(frozen=True)
class CellAddress:
    row: int
    col: int


@dataclass(frozen=True)
class LineSelection:
    """Physical lines for one cell: word line, BL/BLB pair, source line."""

    word_line: int
    bit_line: int
    bit_line_bar: int
    source_line: int


def decode(addr: CellAddress, geometry: ArrayGeometry) -> LineSelection:
    """Row/column decode; injective over the whole address space."""
    if not (0 <= addr.row < geometry.rows and 0 <= addr.col < geometry.cell_cols):
        raise AddressError(
            f"address ({addr.row}, {addr.col}) outside "
            f"{geometry.rows}x{geometry.cell_cols} array"
        )
    return LineSelection(
        word_line=addr.row,
        bit_line=2 * addr.col,
        bit_line_bar=2 * addr.col + 1,
        source_line=addr.row,
    )


@dataclass
class ComplementaryCell:
    dev_bl: MemristorState
    dev_blb: MemristorState

    @property
    def formed(self) -> bool:
        return self.dev_bl.formed and self.dev_blb.formed

    def device(self, side: int) -> MemristorState:
        return self.dev_bl if side == BL_SIDE else self.dev_blb


@dataclass
class LinePhase:
    """Static line voltages for one pulse phase of a digital operation."""

    label: str
    gate_rows: dict[int, float]
    bl_default: float = 0.0
    bl: dict[int, float] = field(default_factory=dict)
    sl: dict[int, float] = field(default_factory=dict)
    # devices receiving an intentional pulse this phase: (row, bit line) -> spec
    targets: dict[tuple[int, int], PulseSpec] = field(default_factory=dict)
    width: float = 0.0

    def stress(self, row: int, bit_line: int) -> float:
        if row not in self.gate_rows:
            return 0.0
        return self.bl.get(bit_line, self.bl_default) - self.sl.get(row, 0.0)


@dataclass
class PhaseStress:
    label: str
    max_offtarget_abs_v: float
    violations: list[tuple[int, int, float]]


@dataclass
class HalfSelectReport:
    phases: list[PhaseStress]

    @property
    def ok(self) -> bool:
        return not any(p.violations for p in self.phases)

    @property
    def n_violations(self) -> int:
        return sum(len(p.violations) for p in self.phases)


@dataclass(frozen=True)
class WriteReport:
    set_report: ApplyReport
    reset_report: ApplyReport


class MemristorArray:
    """State machine over rows x cols complementary cells.

    Not thread-safe; callers serialize operations (the bench protocol loop
    does exactly that).
    """

    def __init__(self, config: ChipConfig, rng: np.random.Generator):
        config.validate()
        self.config = config
        self.geometry = config.geometry
        self.rng = rng
        # creation order is part of the determinism contract:
        # row-major cells, BL device before BLB device
        self.cells: list[list[ComplementaryCell]] = [
            [
                ComplementaryCell(
                    dev_bl=sample_fresh_device(config.device, rng),
                    dev_blb=sample_fresh_device(config.device, rng),
                )
                for _ in range(self.geometry.cell_cols)
            ]
            for _ in range(self.geometry.rows)
        ]

    # -- addressing ---------------------------------------------------------

    def cell(self, addr: CellAddress) -> ComplementaryCell:
        decode(addr, self.geometry)
        return self.cells[addr.row][addr.col]

    def device_at(self, row: int, col: int, side: int) -> MemristorState:
        cell = self.cell(CellAddress(row, col))
        return cell.device(side)

    def iter_addresses(self):
        for row in range(self.geometry.rows):
            for col in range(self.geometry.cell_cols):
                yield CellAddress(row, col)

    # -- phase machinery ----------------------------------------------------

    def _half_select_limit(self) -> float:
        p = self.config.device
        return min(p.v_set_min, p.v_reset_min)

    def _check_phase(self, phase: LinePhase, collect: bool = False) -> PhaseStress:
        """Assert no unselected gated device sees switching-level stress.

        The fast path only inspects the distinct stress values a phase can
        produce (default bit lines, overridden bit lines, per driven row);
        that covers every gated device because bl_default applies to all
        remaining lines.  ``collect`` additionally enumerates the offending
        (row, bit line) pairs for reporting.
        """
        limit = self._half_select_limit()
        worst = 0.0
        violations: list[tuple[int, int, float]] = []
        for row in phase.gate_rows:
            sl_v = phase.sl.get(row, 0.0)
            stress_default = phase.bl_default - sl_v
            lines_overridden = set(phase.bl)
            candidates: list[tuple[int | None, float]] = [(None, stress_default)]
            for line, v in phase.bl.items():
                candidates.append((line, v - sl_v))
            for line, stress in candidates:
                if line is not None and (row, line) in phase.targets:
                    continue
                if line is None and any(
                    t_row == row and t_line not in lines_overridden
                    for (t_row, t_line) in phase.targets
                ):
                    # a target riding on the default level would be a map bug
                    raise InvariantViolation(f"phase {phase.label}: target on default level")
                a = abs(stress)
                if a > worst:
                    worst = a
                if a >= limit:
                    if collect:
                        if line is not None:
                            violations.append((row, line, stress))
                        else:
                            for l in range(self.geometry.n_bit_lines):
                                if l not in lines_overridden and (row, l) not in phase.targets:
                                    violations.append((row, l, stress))
                    else:
                        violations.append((row, -1, stress))
        return PhaseStress(phase.label, worst, violations)

    def _run_phase(self, phase: LinePhase) -> list[ApplyReport]:
        stress = self._check_phase(phase)
        if stress.violations:
            raise InvariantViolation(
                f"half-select violation in phase {phase.label!r}: "
                f"unselected device stress reaches {stress.max_offtarget_abs_v:.3g} V"
            )
        reports = []
        for (row, line), spec in phase.targets.items():
            dev = self.cells[row][line // 2].device(line % 2)
            expected = phase.stress(row, line)
            if abs(expected - spec.amplitude) > 1e-12:
                raise InvariantViolation(
                    f"phase {phase.label!r}: target stress {expected} V "
                    f"disagrees with pulse {spec.amplitude} V"
                )
            reports.append(apply_pulse(dev, self.config.device, spec, self.rng))
        return reports

    def _write_phases(
        self, addr: CellAddress, bit: int, profile: ProgrammingProfile
    ) -> list[LinePhase]:
        sel = decode(addr, self.geometry)
        set_line = sel.bit_line if bit else sel.bit_line_bar
        reset_line = sel.bit_line_bar if bit else sel.bit_line
        inhibit = (
            profile.reset_voltage if profile.inhibit_voltage is None else profile.inhibit_voltage
        )
        set_phase = LinePhase(
            label="set",
            gate_rows={sel.word_line: profile.gate_voltage},
            bl={set_line: profile.set_voltage},
            targets={
                (sel.word_line, set_line): PulseSpec(
                    profile.set_voltage, profile.pulse_width, PulseKind.SET
                )
            },
            width=profile.pulse_width,
        )
        reset_phase = LinePhase(
            label="reset",
            gate_rows={sel.word_line: profile.gate_voltage},
            bl_default=inhibit,
            bl={reset_line: 0.0},
            sl={sel.source_line: profile.reset_voltage},
            targets={
                (sel.word_line, reset_line): PulseSpec(
                    -profile.reset_voltage, profile.pulse_width, PulseKind.RESET
                )
            },
            width=profile.pulse_width,
        )
        return [set_phase, reset_phase]

    def _form_phases(self, addr: CellAddress, forming: FormingProfile) -> list[LinePhase]:
        sel = decode(addr, self.geometry)
        phases = []
        for label, line in (("form_bl", sel.bit_line), ("form_blb", sel.bit_line_bar)):
            phases.append(
                LinePhase(
                    label=label,
                    gate_rows={sel.word_line: forming.gate_voltage},
                    bl={line: forming.form_voltage},
                    targets={
                        (sel.word_line, line): PulseSpec(
                            forming.form_voltage, forming.pulse_width, PulseKind.FORM
                        )
                    },
                    width=forming.pulse_width,
                )
            )
        return phases

    # -- operations ---------------------------------------------------------

    def form_cell(self, addr: CellAddress, forming: FormingProfile | None = None):
        """Form both devices of a cell, one phase per device."""
        cell = self.cell(addr)
        if cell.dev_bl.formed or cell.dev_blb.formed:
            raise StateError(f"cell ({addr.row}, {addr.col}) already formed")
        forming = forming or self.config.forming
        reports = []
        for phase in self._form_phases(addr, forming):
            reports.extend(self._run_phase(phase))
        if not cell.formed:
            raise InvariantViolation("forming pulses did not form the cell")
        return reports

    def write_bit(
        self, addr: CellAddress, bit: int, profile: ProgrammingProfile | None = None
    ) -> WriteReport:
        """Program a logical bit: SET one device, then RESET its complement."""
        if bit not in (0, 1):
            raise ParameterError("bit must be 0 or 1")
        cell = self.cell(addr)
        if not cell.formed:
            raise StateError(f"cell ({addr.row}, {addr.col}) not formed")
        profile = profile or self.config.programming
        phases = self._write_phases(addr, bit, profile)
        set_rep = self._run_phase(phases[0])[0]
        reset_rep = self._run_phase(phases[1])[0]
        return WriteReport(set_rep, reset_rep)

    def half_select_report(
        self,
        addr: CellAddress,
        bit: int = 1,
        profile: ProgrammingProfile | None = None,
        forming: FormingProfile | None = None,
    ) -> HalfSelectReport:
        """Stress report for the phases a write (and forming) would apply."""
        profile = profile or self.config.programming
        forming = forming or self.config.forming
        phases = self._write_phases(addr, bit, profile) + self._form_phases(addr, forming)
        return HalfSelectReport([self._check_phase(p, collect=True) for p in phases])

    def _cycling_profile_guard(self, profile: ProgrammingProfile) -> float:
        p = self.config.device
        if profile.set_voltage < p.v_set_min or profile.reset_voltage < p.v_reset_min:
            raise ParameterError("cycling requires a profile above both switching thresholds")
        if profile.pulse_width < p.t_min:
            raise ParameterError("cycling requires pulse_width >= t_min")
        return _reset_eta_base(p, profile.reset_voltage, profile.pulse_width)

    def cycle_cell(
        self,
        addr: CellAddress,
        n_writes: int,
        first_bit: int = 1,
        profile: ProgrammingProfile | None = None,
    ) -> None:
        """Apply ``n_writes`` alternating-bit writes through the kernel backend.

        Bit-for-bit equivalent (state and RNG stream) to calling
        :meth:`write_bit` ``n_writes`` times with alternating bits.
        """
        if n_writes < 0:
            raise ParameterError("n_writes must be >= 0")
        if n_writes == 0:
            return
        cell = self.cell(addr)
        if not cell.formed:
            raise StateError("cell not formed")
        profile = profile or self.config.programming
        eta_reset = self._cycling_profile_guard(profile)
        for phase in self._write_phases(addr, first_bit, profile):
            stress = self._check_phase(phase)
            if stress.violations:
                raise InvariantViolation(f"half-select violation in phase {phase.label!r}")
        p = self.config.device
        z = self.rng.standard_normal(2 * n_writes)
        w_bl, w_blb = active_backend().write_cycle_train(
            cell.dev_bl.w, cell.dev_blb.w, n_writes, first_bit, eta_reset, p.sigma_c2c, z
        )
        for dev, w in ((cell.dev_bl, w_bl), (cell.dev_blb, w_blb)):
            dev.w = float(w)
            dev.cycle_count += n_writes
            dev.degradation = degradation_level(
                dev.cycle_count, dev.endurance_limit, p.degradation_steepness
            )

    def cycle_cell_batched(
        self,
        addr: CellAddress,
        n_writes: int,
        first_bit: int = 1,
        profile: ProgrammingProfile | None = None,
    ) -> None:
        """Event-count compression: one update statistically identical to
        ``n_writes`` sequential alternating writes.

        SET redraws the filament and a full-strength RESET is memoryless, so
        the final state depends only on the last write each device saw: the
        device written last gets a fresh SET draw; its complement gets a fresh
        SET draw (from its own last SET) followed by one RESET decay.  Cycle
        counters and wear advance exactly as in the sequential path.
        """
        if n_writes < 0:
            raise ParameterError("n_writes must be >= 0")
        if n_writes == 0:
            return
        cell = self.cell(addr)
        if not cell.formed:
            raise StateError("cell not formed")
        profile = profile or self.config.programming
        eta_reset_base = self._cycling_profile_guard(profile)
        p = self.config.device
        last_bit = first_bit ^ ((n_writes - 1) & 1)
        dev_set = cell.dev_bl if last_bit else cell.dev_blb
        dev_rst = cell.dev_blb if last_bit else cell.dev_bl
        dev_set.w = _target_w(p.sigma_c2c, self.rng.standard_normal())
        if n_writes >= 2:
            dev_rst.w = _target_w(p.sigma_c2c, self.rng.standard_normal())
        eta = eta_reset_base * math.exp(p.sigma_c2c * self.rng.standard_normal())
        if eta > 1.0:
            eta = 1.0
        dev_rst.w *= 1.0 - eta
        for dev in (cell.dev_bl, cell.dev_blb):
            dev.cycle_count += n_writes
            dev.degradation = degradation_level(
                dev.cycle_count, dev.endurance_limit, p.degradation_steepness
            )

    # -- snapshotting -------------------------------------------------------

    CSV_HEADER = ["row", "col", "side", "w", "formed", "cycles", "degradation"]

    def export_csv(self) -> str:
        """Array state table: row,col,side,w,formed,cycles,degradation."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for addr in self.iter_addresses():
            cell = self.cells[addr.row][addr.col]
            for side in (BL_SIDE, BLB_SIDE):
                dev = cell.device(side)
                writer.writerow(
                    [
                        addr.row,
                        addr.col,
                        SIDE_NAMES[side],
                        repr(dev.w),
                        int(dev.formed),
                        dev.cycle_count,
                        repr(dev.degradation),
                    ]
                )
        return buf.getvalue()

    def import_csv(self, text: str) -> None:
        """Restore the fields covered by the CSV schema onto existing devices.

        Per-device frozen samples (d2d factor, endurance budget) are not part
        of the schema and keep their current values.
        """
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != self.CSV_HEADER:
            raise ParameterError(f"unexpected snapshot header {header!r}")
        for rownum, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                row, col, side = int(rec[0]), int(rec[1]), SIDE_BY_NAME[rec[2]]
                w, formed = float(rec[3]), bool(int(rec[4]))
                cycles, degradation = int(rec[5]), float(rec[6])
            except (ValueError, KeyError, IndexError):
                raise ParameterError(f"bad snapshot record on line {rownum}") from None
            dev = self.device_at(row, col, side)
            dev.w = w
            dev.formed = formed
            dev.cycle_count = cycles
            dev.degradation = degradation
