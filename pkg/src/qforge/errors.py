"""Exception hierarchy shared by every qforge layer."""


class QForgeError(Exception):
    """Base class for all errors raised by qforge."""


class GateError(QForgeError):
    """Bad gate construction or an operation the gate does not support."""


class NotInvertibleError(GateError):
    pass


class CommandError(QForgeError):
    """A command violates a structural rule (control/target overlap, duplicates)."""


class LifetimeError(QForgeError):
    """A command referenced a qubit that is not currently allocated."""


class MeasurementError(QForgeError):
    pass


class ScopeError(QForgeError):
    """Misuse of a meta-instruction block (Compute, Dagger, Loop, ...)."""


class DecompositionError(QForgeError):
    pass


class FilterError(QForgeError):
    pass


class MappingError(QForgeError):
    pass


class SimulationError(QForgeError):
    pass


class DeallocationError(SimulationError):
    """A qubit was released while not in a computational basis state."""


class MathGateError(SimulationError):
    """A classical function handed to the emulator is not a bijection."""
