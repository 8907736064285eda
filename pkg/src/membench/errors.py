"""Exception hierarchy shared by the simulator core and the bench protocol.

Every exception carries a ``wire_code`` so the protocol layer can map a
failure to a stable ``ERR <code>`` reply without inspecting messages.
"""


class BenchError(Exception):
    """Base class for all simulator errors."""

    wire_code = "INTERNAL"


class ParameterError(BenchError):
    """A parameter or argument is outside its legal domain."""

    wire_code = "RANGE"


class AddressError(BenchError):
    """Cell address outside the array geometry."""

    wire_code = "ADDR"


class StateError(BenchError):
    """Operation illegal in the current device/cell/routing state."""

    wire_code = "STATE"


class ModeError(BenchError):
    """Digital operation attempted in analog mode or vice versa."""

    wire_code = "MODE"


class InvariantViolation(BenchError):
    """Internal consistency check failed (a simulator bug, not user error)."""

    wire_code = "INTERNAL"
