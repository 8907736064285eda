"""Line-oriented bench control protocol.

One command per line, one reply per command, always.  Replies are either a
single line starting with ``OK``, a block reply — ``OK`` on its own line,
payload lines, then ``END`` — or a single line ``ERR <CODE> <message>``.
The session never raises out of :meth:`BenchSession.handle_line`; anything
unexpected becomes ``ERR INTERNAL``.

Verbs (arguments are whitespace-separated; block replies marked *):

=========  ==================================================================
PING       liveness check, replies ``OK pong``
MODE       ``MODE`` reports, ``MODE DIGITAL|ANALOG`` switches
FORM       ``FORM <row> <col>`` or ``FORM ALL``
WRITE      ``WRITE <row> <col> <bit>``
READBIT    ``READBIT <row> <col>`` replies ``OK <bit>``
XNOR       ``XNOR <row> <col> <b>`` replies ``OK <bit>``
SRLOAD     ``SRLOAD <bits>`` loads the routing shift register
WAVE*      ``WAVE <A|B> <dt> <level:dur[xN][,...]>`` replies sampled current
MEASR      ``MEASR <A|B> <volts> [n_avg]`` replies ``OK <ohms>``
PARAMS*    ``PARAMS DUMP`` (block) or ``PARAMS SET <key> <value>``
SNAPSHOT   ``SNAPSHOT <path>`` saves full chip state
RESTORE    ``RESTORE <path>`` replaces the chip from a snapshot file
SEED       ``SEED <n>`` fresh die and stream, same configuration
RUN*       ``RUN <experiment> [seed=N] [knob=value ...]`` replies result CSV
=========  ==================================================================

Error codes: ``PARSE`` (malformed command), ``MODE`` (wrong operating mode),
``ADDR`` (address out of range), ``STATE`` (operation illegal in the current
device state), ``RANGE`` (parameter out of range), ``IO`` (file system),
``INTERNAL`` (simulator invariant violation or unexpected fault).
"""

from __future__ import annotations

from .analog import Waveform, WaveformSegment, samples_to_csv
from .chip import Chip
from .errors import BenchError, ParameterError
from .experiments import coerce_knob, run_experiment
from .params import ChipConfig, apply_overrides, dump_config

_MAX_ERR_MSG = 200


def _fmt_err(code: str, message: str) -> str:
    msg = " ".join(str(message).split()) or "error"
    if len(msg) > _MAX_ERR_MSG:
        msg = msg[: _MAX_ERR_MSG - 3] + "..."
    return f"ERR {code} {msg}"


def _block(payload: str) -> str:
    if payload and not payload.endswith("\n"):
        payload += "\n"
    return "OK\n" + payload + "END"


def parse_wave_segments(spec: str) -> list[WaveformSegment]:
    """Parse ``level:dur[xN]`` items, comma separated."""
    segments: list[WaveformSegment] = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            raise ValueError("empty waveform item")
        if ":" not in item:
            raise ValueError(f"waveform item {item!r} needs level:duration")
        level_s, dur_s = item.split(":", 1)
        repeat = 1
        if "x" in dur_s:
            dur_s, rep_s = dur_s.rsplit("x", 1)
            repeat = int(rep_s)
            if repeat < 1:
                raise ValueError("repeat count must be >= 1")
        seg = WaveformSegment(float(level_s), float(dur_s))
        segments.extend([seg] * repeat)
    return segments


class BenchSession:
    """One exclusive simulator behind the text protocol.

    State (die, mode, routing, configuration) persists across commands and
    across reconnects for as long as the session object lives; ``SEED``
    starts a fresh die.
    """

    def __init__(self, config: ChipConfig | None = None, seed: int | None = None):
        self.chip = Chip(config, seed)

    # -- dispatch -------------------------------------------------------------

    def handle_line(self, line: str) -> str:
        """Process one command line, returning the full reply (no trailing \\n)."""
        try:
            parts = line.split()
            if not parts:
                raise ValueError("empty command")
            verb, args = parts[0], parts[1:]
            handler = getattr(self, f"_cmd_{verb.lower()}", None)
            if verb != verb.upper() or handler is None:
                raise ValueError(f"unknown verb {verb!r}")
            return handler(args, line)
        except BenchError as exc:
            return _fmt_err(exc.wire_code, str(exc))
        except (ValueError, TypeError) as exc:
            return _fmt_err("PARSE", str(exc))
        except OSError as exc:
            return _fmt_err("IO", str(exc))
        except Exception as exc:  # crash-proof by contract
            return _fmt_err("INTERNAL", f"{type(exc).__name__}: {exc}")

    @staticmethod
    def _arity(args: list[str], *counts: int) -> None:
        if len(args) not in counts:
            want = " or ".join(str(c) for c in counts)
            raise ValueError(f"expected {want} argument(s), got {len(args)}")

    # -- verbs ----------------------------------------------------------------

    def _cmd_ping(self, args, line):
        self._arity(args, 0)
        return "OK pong"

    def _cmd_mode(self, args, line):
        self._arity(args, 0, 1)
        if args:
            self.chip.set_mode(args[0])
        return f"OK {self.chip.mode.value}"

    def _cmd_form(self, args, line):
        if args == ["ALL"]:
            self.chip.form_all()
            return "OK"
        self._arity(args, 2)
        self.chip.form_cell(int(args[0]), int(args[1]))
        return "OK"

    def _cmd_write(self, args, line):
        self._arity(args, 3)
        bit = int(args[2])
        if bit not in (0, 1):
            raise ParameterError("bit must be 0 or 1")
        self.chip.write_bit(int(args[0]), int(args[1]), bit)
        return "OK"

    def _cmd_readbit(self, args, line):
        self._arity(args, 2)
        return f"OK {self.chip.read_bit(int(args[0]), int(args[1]))}"

    def _cmd_xnor(self, args, line):
        self._arity(args, 3)
        b = int(args[2])
        if b not in (0, 1):
            raise ParameterError("logic input must be 0 or 1")
        return f"OK {self.chip.xnor(int(args[0]), int(args[1]), b)}"

    def _cmd_srload(self, args, line):
        self._arity(args, 1)
        self.chip.load_shift_register(args[0])
        return "OK"

    def _cmd_wave(self, args, line):
        if len(args) < 3:
            raise ValueError("usage: WAVE <A|B> <dt> <level:dur[xN],...>")
        pad, dt_s = args[0], args[1]
        spec = " ".join(args[2:])  # tolerate spaces after commas
        waveform = Waveform(tuple(parse_wave_segments(spec)), float(dt_s))
        samples = self.chip.apply_waveform(pad, waveform)
        return _block(samples_to_csv(samples))

    def _cmd_measr(self, args, line):
        self._arity(args, 2, 3)
        n_avg = int(args[2]) if len(args) == 3 else 8
        r = self.chip.measure_resistance(args[0], float(args[1]), n_avg)
        return f"OK {r!r}"

    def _cmd_params(self, args, line):
        if args[:1] == ["DUMP"]:
            self._arity(args, 1)
            return _block(dump_config(self.chip.config))
        if args[:1] == ["SET"]:
            self._arity(args, 3)
            key, value = args[1], args[2]
            new = apply_overrides(self.chip.config, {key: coerce_knob(value)})
            self.chip.set_config(new)
            return "OK"
        raise ValueError("usage: PARAMS DUMP | PARAMS SET <key> <value>")

    def _cmd_snapshot(self, args, line):
        if not args:
            raise ValueError("usage: SNAPSHOT <path>")
        path = line.split(None, 1)[1].strip()
        self.chip.save_snapshot(path)
        return "OK"

    def _cmd_restore(self, args, line):
        if not args:
            raise ValueError("usage: RESTORE <path>")
        path = line.split(None, 1)[1].strip()
        self.chip = Chip.load_snapshot(path)
        return "OK"

    def _cmd_seed(self, args, line):
        self._arity(args, 1)
        self.chip.reseed(int(args[0]))
        return f"OK seeded {self.chip.seed}"

    def _cmd_run(self, args, line):
        if not args:
            raise ValueError("usage: RUN <experiment> [seed=N] [knob=value ...]")
        name, seed, knobs = args[0], 0, {}
        for pair in args[1:]:
            if "=" not in pair:
                raise ValueError(f"expected knob=value, got {pair!r}")
            key, value = pair.split("=", 1)
            if key == "seed":
                seed = int(value)
            else:
                knobs[key] = coerce_knob(value)
        return _block(run_experiment(name, self.chip.config, seed, **knobs))
