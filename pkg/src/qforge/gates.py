"""Gate catalog, commands and scope tags.

Gates are immutable values. Applying one to qubits with ``gate | qubits``
builds a :class:`Command` and hands it to the engine that owns the qubits.
Commands only carry integer qubit ids, never qubit handles, so a command
buffered somewhere in the compiler chain never keeps a qubit alive.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import CommandError, GateError, NotInvertibleError

PARAM_TOL = 1e-12
FOUR_PI = 4 * math.pi
TWO_PI = 2 * math.pi


class _NoMerge:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NO_MERGE"

    def __bool__(self) -> bool:
        return False


NO_MERGE = _NoMerge()


def format_param(value: Any) -> str:
    """Canonical text for a gate parameter: integers verbatim, reals to 10 decimals."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    text = f"{float(value):.10f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def _normalize_angle(angle: float, period: float) -> float:
    angle = math.fmod(float(angle), period)
    if angle < 0:
        angle += period
    if period - angle < PARAM_TOL:
        angle = 0.0
    return angle


def _angles_close(a: float, b: float, period: float) -> bool:
    d = abs(a - b) % period
    return min(d, period - d) <= PARAM_TOL


# --------------------------------------------------------------------- tags


@dataclass(frozen=True)
class ComputeTag:
    def __str__(self) -> str:
        return "Compute"


@dataclass(frozen=True)
class UncomputeTag:
    def __str__(self) -> str:
        return "Uncompute"


@dataclass(frozen=True)
class DirtyTag:
    def __str__(self) -> str:
        return "Dirty"


@dataclass(frozen=True)
class LoopTag:
    id: int
    iterations: int

    def __post_init__(self):
        if self.iterations < 1:
            raise GateError("loop iterations must be positive")

    def __str__(self) -> str:
        return f"Loop({self.id},{self.iterations})"


@dataclass(frozen=True)
class LogicalQubitTag:
    """Attached by a mapper to a Measure so results land on the logical id."""

    logical_id: int

    def __str__(self) -> str:
        return f"Logical({self.logical_id})"


SCOPE_TAGS = (ComputeTag, UncomputeTag)


def has_scope_tag(tags: Iterable[Any]) -> bool:
    return any(isinstance(t, SCOPE_TAGS) for t in tags)


# -------------------------------------------------------------------- gates


class BasicGate:
    """Base class of all gates.

    ``params`` holds the (normalized) classical parameters; equality is the
    gate class plus parameter equality within ``PARAM_TOL``.
    """

    name: str = "Gate"
    params: tuple = ()
    #: numbers of qubits per target register, or None for "any"
    arity: tuple[int, ...] | None = None

    @property
    def matrix(self) -> np.ndarray | None:
        return None

    def inverse(self) -> "BasicGate":
        return DaggeredGate(self)

    def try_merge(self, other: "BasicGate"):
        return NO_MERGE

    def is_identity(self, n_controls: int = 0) -> bool:
        return False

    def _params_equal(self, other: "BasicGate") -> bool:
        if len(self.params) != len(other.params):
            return False
        for a, b in zip(self.params, other.params):
            if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
                if a != b:
                    return False
            elif abs(a - b) > PARAM_TOL:
                return False
        return True

    def __eq__(self, other: object) -> bool:
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, BasicGate) else False
        return self.name == other.name and self._params_equal(other)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.name, len(self.params)))

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}({','.join(format_param(p) for p in self.params)})"

    __repr__ = __str__

    def __or__(self, qubits) -> None:
        apply_gate(self, qubits)


class MatrixGate(BasicGate):
    """A fixed unitary on one or two qubits."""

    def __init__(self, name: str, matrix: Sequence[Sequence[complex]]):
        self.name = name
        self._matrix = np.array(matrix, dtype=complex)
        self._matrix.setflags(write=False)
        nq = int(round(math.log2(self._matrix.shape[0])))
        if self._matrix.shape != (1 << nq, 1 << nq) or nq > 2:
            raise GateError(f"{name}: matrix must be 2x2 or 4x4")
        if not _is_unitary(self._matrix):
            raise GateError(f"{name}: matrix is not unitary")
        self.arity = (nq,) if nq == 1 else None
        self._n_qubits = nq

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_qubits(self) -> int:
        return self._n_qubits


class SelfInverseGate(MatrixGate):
    def inverse(self) -> BasicGate:
        return self


class _AngleGate(BasicGate):
    period = FOUR_PI
    arity = (1,)

    def __init__(self, angle: float):
        self.params = (_normalize_angle(angle, self.period),)

    @property
    def angle(self) -> float:
        return self.params[0]

    def _params_equal(self, other: BasicGate) -> bool:
        return _angles_close(self.angle, other.params[0], self.period)

    def inverse(self) -> BasicGate:
        return type(self)(-self.angle)

    def try_merge(self, other: BasicGate):
        if type(other) is type(self):
            return type(self)(self.angle + other.angle)
        return NO_MERGE

    def is_identity(self, n_controls: int = 0) -> bool:
        if _angles_close(self.angle, 0.0, self.period):
            return True
        # Rotations by 2*pi are -1: a pure global phase, but only without controls.
        return (
            self.period == FOUR_PI
            and n_controls == 0
            and _angles_close(self.angle, TWO_PI, self.period)
        )

    @property
    def n_qubits(self) -> int:
        return 1


class Rx(_AngleGate):
    name = "Rx"

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


class Ry(_AngleGate):
    name = "Ry"

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)


class Rz(_AngleGate):
    name = "Rz"

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[cmath.exp(-0.5j * self.angle), 0], [0, cmath.exp(0.5j * self.angle)]],
            dtype=complex,
        )


class R(_AngleGate):
    """Phase shift diag(1, e^{i angle})."""

    name = "R"
    period = TWO_PI

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1, 0], [0, cmath.exp(1j * self.angle)]], dtype=complex)


class DaggeredGate(BasicGate):
    """Inverse of a gate that has no cheaper closed-form inverse."""

    def __init__(self, gate: BasicGate):
        if isinstance(gate, ClassicalInstruction):
            raise NotInvertibleError(f"{gate} is not invertible")
        self.gate = gate
        self.name = gate.name + "†"
        self.params = gate.params
        self.arity = gate.arity

    @property
    def matrix(self) -> np.ndarray | None:
        m = self.gate.matrix
        return None if m is None else m.conj().T

    @property
    def n_qubits(self) -> int:
        return getattr(self.gate, "n_qubits", 0)

    def inverse(self) -> BasicGate:
        return self.gate

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DaggeredGate) and self.gate == other.gate

    def __hash__(self) -> int:
        return hash(("dagger", hash(self.gate)))


class ClassicalInstruction(BasicGate):
    """Allocation, deallocation, measurement and flush directives."""

    def inverse(self) -> BasicGate:
        raise NotInvertibleError(f"{self.name} is not invertible")

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other)

    def __hash__(self) -> int:
        return hash(type(self).__name__)


class AllocateQubitGate(ClassicalInstruction):
    name = "Allocate"

    def inverse(self) -> BasicGate:
        return Deallocate


class DeallocateQubitGate(ClassicalInstruction):
    name = "Deallocate"

    def inverse(self) -> BasicGate:
        return Allocate


class MeasureGate(ClassicalInstruction):
    name = "Measure"

    def __or__(self, qubits) -> None:
        # one command per qubit, whatever the register structure
        for reg in _to_quregs(qubits):
            for q in reg:
                apply_gate(self, q)


class FlushGate(ClassicalInstruction):
    name = "Flush"


class EntangleGate(BasicGate):
    """H on the first qubit, then CNOTs from it onto every other qubit."""

    name = "Entangle"


class QFTGate(BasicGate):
    name = "QFT"


class BasicMathGate(BasicGate):
    """A gate acting as a bijection on the integers stored in its registers.

    Subclasses implement :meth:`apply_classical`, vectorized over numpy int64
    arrays of register values. Multi-register math gates are not needed by
    the shipped library, so exactly one target register is assumed.
    """

    arity = None

    def apply_classical(self, x: np.ndarray, width: int) -> np.ndarray:
        raise NotImplementedError

    def classical_table(self, width: int) -> np.ndarray:
        x = np.arange(1 << width, dtype=np.int64)
        return np.asarray(self.apply_classical(x, width), dtype=np.int64)

    def classical_fn(self, width: int) -> Callable[[int], int]:
        def fn(x: int) -> int:
            return int(self.apply_classical(np.array([x], dtype=np.int64), width)[0])

        return fn


def _is_unitary(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


_S2 = 1 / math.sqrt(2)

H = SelfInverseGate("H", [[_S2, _S2], [_S2, -_S2]])
X = SelfInverseGate("X", [[0, 1], [1, 0]])
Y = SelfInverseGate("Y", [[0, -1j], [1j, 0]])
Z = SelfInverseGate("Z", [[1, 0], [0, -1]])
S = MatrixGate("S", [[1, 0], [0, 1j]])
T = MatrixGate("T", [[1, 0], [0, cmath.exp(0.25j * math.pi)]])
Sdag = S.inverse()
Tdag = T.inverse()
Swap = SelfInverseGate("Swap", [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])

Allocate = AllocateQubitGate()
Deallocate = DeallocateQubitGate()
Measure = MeasureGate()
Flush = FlushGate()
Entangle = EntangleGate()
QFT = QFTGate()


class ControlledGate:
    """``C(gate, n) | (c1, ..., cn, target)``: the first n registers are controls.

    Not a gate of its own: the command it emits is ``gate`` with controls.
    """

    def __init__(self, gate: BasicGate, n: int = 1):
        if n < 1:
            raise GateError("a controlled gate needs at least one control")
        self.gate = gate
        self.n = n

    @property
    def name(self) -> str:
        return "C" * self.n + self.gate.name

    def inverse(self) -> "ControlledGate":
        return ControlledGate(self.gate.inverse(), self.n)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ControlledGate) and (self.gate, self.n) == (other.gate, other.n)

    def __hash__(self) -> int:
        return hash(("C", self.n, hash(self.gate)))

    def __str__(self) -> str:
        return "C" * self.n + str(self.gate)

    def __or__(self, qubits) -> None:
        regs = _to_quregs(qubits)
        flat = [q for reg in regs for q in reg]
        if len(regs) > self.n:
            controls, targets = regs[: self.n], regs[self.n:]
            controls = [q for reg in controls for q in reg]
        else:
            controls, targets = flat[: self.n], [[q] for q in flat[self.n:]]
        if len(controls) != self.n or not targets:
            raise GateError(f"{self}: expected {self.n} control(s) and a target")
        _emit(self.gate, targets, controls)


def C(gate: BasicGate, n: int = 1) -> ControlledGate:
    return ControlledGate(gate, n)


CNOT = CX = ControlledGate(X)
CZ = ControlledGate(Z)
Toffoli = ControlledGate(X, 2)


class All:
    """``All(gate) | qureg`` applies a single-qubit gate to every qubit."""

    def __init__(self, gate: BasicGate):
        self.gate = gate

    def __or__(self, qubits) -> None:
        for reg in _to_quregs(qubits):
            for q in reg:
                self.gate | q


Tensor = All


# ------------------------------------------------------------------ catalog

_FIXED = {"H": H, "X": X, "Y": Y, "Z": Z, "S": S, "T": T, "Sdag": Sdag, "Tdag": Tdag,
          "Swap": Swap, "Measure": Measure, "Allocate": Allocate,
          "Deallocate": Deallocate, "Flush": Flush, "Entangle": Entangle, "QFT": QFT,
          "CNOT": CNOT, "Toffoli": Toffoli}
_ROTATIONS = {"Rx": Rx, "Ry": Ry, "Rz": Rz, "R": R}

CATALOG = tuple(_FIXED) + tuple(_ROTATIONS)


def standard_gate(name: str, params: Sequence[float] = ()):
    """Look up a catalog gate by name; rotation names take one angle."""
    params = list(params)
    if name in _ROTATIONS:
        if len(params) != 1:
            raise GateError(f"{name} takes exactly one parameter, got {len(params)}")
        return _ROTATIONS[name](params[0])
    if name in _FIXED:
        if params:
            raise GateError(f"{name} takes no parameters")
        return _FIXED[name]
    raise GateError(f"unknown gate {name!r}")


def inverse(gate):
    return gate.inverse()


def try_merge(a: BasicGate, b: BasicGate):
    """Merged gate for ``a`` followed by ``b``, or ``NO_MERGE``."""
    return a.try_merge(b)


def is_identity(gate: BasicGate, controls: int = 0) -> bool:
    return gate.is_identity(controls)


# ----------------------------------------------------------------- commands


@dataclass(frozen=True)
class Command:
    """One gate applied to registers of qubit ids, plus controls and tags."""

    gate: BasicGate
    qubits: tuple[tuple[int, ...], ...]
    controls: tuple[int, ...] = ()
    tags: tuple = field(default=())

    def __post_init__(self):
        qubits = tuple(tuple(int(q) for q in reg) for reg in self.qubits)
        controls = tuple(sorted(set(int(c) for c in self.controls)))
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "tags", tuple(self.tags))
        flat = [q for reg in qubits for q in reg]
        if len(set(flat)) != len(flat):
            raise CommandError(f"{self.gate}: duplicate target qubit in {qubits}")
        if set(flat) & set(controls):
            raise CommandError(
                f"{self.gate}: control qubit(s) {sorted(set(flat) & set(controls))} "
                "also used as target"
            )
        if has_scope_tag(self.tags) and all(
            any(isinstance(t, k) for t in self.tags) for k in SCOPE_TAGS
        ):
            raise CommandError("a command cannot be tagged Compute and Uncompute at once")

    @property
    def targets(self) -> tuple[int, ...]:
        return tuple(q for reg in self.qubits for q in reg)

    @property
    def all_ids(self) -> tuple[int, ...]:
        return self.targets + self.controls

    @property
    def loop_tags(self) -> tuple:
        return tuple(t for t in self.tags if isinstance(t, LoopTag))

    def has_tag(self, kind: type) -> bool:
        return any(isinstance(t, kind) for t in self.tags)

    def inverse(self) -> "Command":
        return Command(self.gate.inverse(), self.qubits, self.controls, self.tags)

    def with_gate(self, gate: BasicGate) -> "Command":
        return Command(gate, self.qubits, self.controls, self.tags)

    def with_controls(self, extra: Iterable[int]) -> "Command":
        return Command(self.gate, self.qubits, self.controls + tuple(extra), self.tags)

    def with_tags(self, tags: Iterable[Any]) -> "Command":
        return Command(self.gate, self.qubits, self.controls, tuple(tags))

    def add_tags(self, *tags: Any) -> "Command":
        return self.with_tags(self.tags + tuple(t for t in tags if t not in self.tags))

    def remap(self, mapping: dict[int, int]) -> "Command":
        return Command(
            self.gate,
            tuple(tuple(mapping.get(q, q) for q in reg) for reg in self.qubits),
            tuple(mapping.get(c, c) for c in self.controls),
            self.tags,
        )

    def __str__(self) -> str:
        regs = [f"[{', '.join(map(str, reg))}]" for reg in self.qubits]
        if not regs:
            text = str(self.gate)
        elif len(regs) == 1:
            text = f"{self.gate} | {regs[0]}"
        else:
            text = f"{self.gate} | ({', '.join(regs)})"
        if self.controls:
            text += f" ; ctrl=[{', '.join(map(str, self.controls))}]"
        if self.tags:
            text += f" ; tags=[{', '.join(str(t) for t in self.tags)}]"
        return text


# ------------------------------------------------------------ application


def _to_quregs(qubits) -> list[list]:
    from .engine import Qubit

    if isinstance(qubits, Qubit):
        return [[qubits]]
    if isinstance(qubits, tuple):
        regs = []
        for item in qubits:
            regs.append([item] if isinstance(item, Qubit) else list(item))
        return regs
    return [list(qubits)]


def _emit(gate: BasicGate, regs: Sequence[Sequence], controls: Sequence = ()) -> None:
    regs = [list(r) for r in regs]
    if not regs or not any(regs):
        raise GateError(f"{gate}: no qubits given")
    first = next(q for r in regs for q in r)
    engine = first.engine
    cmd = Command(gate, tuple(tuple(q.id for q in r) for r in regs),
                  tuple(q.id for q in controls))
    engine.emit(cmd)


def apply_gate(gate: BasicGate, qubits) -> None:
    regs = _to_quregs(qubits)
    n = getattr(gate, "n_qubits", None)
    flat = [q for r in regs for q in r]
    if n is not None and n > 0 and len(flat) != n:
        if n == 1:
            raise GateError(
                f"{gate} acts on one qubit but got {len(flat)}; use All({gate.name}) | qureg"
            )
        raise GateError(f"{gate} acts on {n} qubits but got {len(flat)}")
    _emit(gate, regs)
