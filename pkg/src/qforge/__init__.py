"""qforge: a quantum-program compiler with interchangeable back-ends.

Programs are written against :class:`MainEngine` with the ``gate | qubits``
syntax, compiled by a chain of engines and executed (or counted, drawn,
printed) by a back-end.
"""
from .arith import (AddConstant, AddConstantModN, MultiplyByConstantModN, SubConstant,
                    SubConstantModN)
from .engine import BasicEngine, MainEngine, Qubit, Qureg
from .errors import (CommandError, DeallocationError, DecompositionError, FilterError, GateError,
                     LifetimeError, MappingError, MathGateError, MeasurementError, QForgeError,
                     ScopeError, SimulationError)
from .gates import (CNOT, CX, CZ, NO_MERGE, QFT, All, Allocate, C, Command, Deallocate, Entangle,
                    Flush, H, Measure, R, Rx, Ry, Rz, S, Sdag, Swap, T, Tdag, Tensor, Toffoli, X,
                    Y, Z, inverse, is_identity, standard_gate, try_merge)
from .meta import Compute, Control, CustomUncompute, Dagger, Loop, Uncompute, uncompute

__version__ = "0.1.0"

__all__ = [
    "AddConstant", "AddConstantModN", "All", "Allocate", "BasicEngine", "C", "CNOT", "CX", "CZ",
    "Command", "CommandError", "Compute", "Control", "CustomUncompute", "Dagger",
    "Deallocate", "DeallocationError", "DecompositionError", "Entangle", "FilterError", "Flush",
    "GateError", "H", "LifetimeError", "Loop", "MainEngine", "MappingError", "MathGateError",
    "Measure", "MeasurementError", "MultiplyByConstantModN", "NO_MERGE", "QFT", "QForgeError",
    "Qubit", "Qureg", "R", "Rx", "Ry", "Rz", "S", "ScopeError", "Sdag", "SimulationError",
    "SubConstant", "SubConstantModN", "Swap", "T", "Tdag", "Tensor", "Toffoli", "Uncompute", "X",
    "Y", "Z", "inverse", "is_identity", "standard_gate", "try_merge", "uncompute",
]
