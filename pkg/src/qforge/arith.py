"""Quantum integer arithmetic: Draper constant adders, Beauregard modular
adders and modular multiplication, each a math gate with decomposition rules.

Registers are unsigned integers with qubit 0 as the least significant bit.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import GateError, MathGateError
from .gates import CNOT, NO_MERGE, QFT, BasicMathGate, R, Swap, X
from .meta import Compute, Control, CustomUncompute, uncompute
from .passes.replacer import BoundCommand, DecompositionRule, RuleSet


def _int(value, what: str) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise GateError(f"{what} must be an integer, got {value!r}")
    return int(value)


class AddConstant(BasicMathGate):
    """|x> -> |x + c mod 2^w> on a w-qubit register."""

    name = "AddConstant"

    def __init__(self, c: int):
        self.params = (_int(c, "constant"),)

    @property
    def c(self) -> int:
        return self.params[0]

    def apply_classical(self, x, width):
        return (x + self.c) % (1 << width)

    def inverse(self):
        return AddConstant(-self.c)

    def try_merge(self, other):
        if isinstance(other, AddConstant):
            return AddConstant(self.c + other.c)
        return NO_MERGE

    def is_identity(self, n_controls=0):
        return self.c == 0


def SubConstant(c: int) -> AddConstant:
    """|x> -> |x - c mod 2^w>, i.e. the inverse of ``AddConstant(c)``."""
    return AddConstant(-_int(c, "constant"))


def _check_modulus(N) -> int:
    N = _int(N, "modulus")
    if N < 2:
        raise GateError(f"modulus must be >= 2, got {N}")
    return N


class AddConstantModN(BasicMathGate):
    """|x> -> |x + c mod N> for x < N; values x >= N are left alone."""

    name = "AddConstantModN"

    def __init__(self, c: int, N: int):
        N = _check_modulus(N)
        c = _int(c, "constant")
        if not 0 <= c < N:
            raise GateError(f"AddConstantModN needs 0 <= c < N, got c={c}, N={N}")
        self.params = (c, N)

    @property
    def c(self) -> int:
        return self.params[0]

    @property
    def N(self) -> int:
        return self.params[1]

    def apply_classical(self, x, width):
        if self.N > (1 << width):
            raise MathGateError(f"modulus {self.N} does not fit a {width}-qubit register")
        return np.where(x < self.N, (x + self.c) % self.N, x)

    def inverse(self):
        return SubConstantModN(self.c, self.N)

    def try_merge(self, other):
        if isinstance(other, AddConstantModN) and other.N == self.N:
            return AddConstantModN((self.c + other.c) % self.N, self.N)
        return NO_MERGE

    def is_identity(self, n_controls=0):
        return self.c == 0


def SubConstantModN(c: int, N: int) -> AddConstantModN:
    N = _check_modulus(N)
    c = _int(c, "constant")
    if not 0 <= c < N:
        raise GateError(f"SubConstantModN needs 0 <= c < N, got c={c}, N={N}")
    return AddConstantModN((N - c) % N, N)


class MultiplyByConstantModN(BasicMathGate):
    """|x> -> |c*x mod N> for x < N (gcd(c, N) must be 1)."""

    name = "MultiplyByConstantModN"

    def __init__(self, c: int, N: int):
        N = _check_modulus(N)
        c = _int(c, "constant") % N
        if math.gcd(c, N) != 1:
            raise GateError(f"MultiplyByConstantModN needs gcd(c, N) = 1, got c={c}, N={N}")
        self.params = (c, N)

    @property
    def c(self) -> int:
        return self.params[0]

    @property
    def N(self) -> int:
        return self.params[1]

    def apply_classical(self, x, width):
        if self.N > (1 << width):
            raise MathGateError(f"modulus {self.N} does not fit a {width}-qubit register")
        # c*x < N^2 < 2^63 for every N this simulator can hold
        return np.where(x < self.N, (x * self.c) % self.N, x)

    def inverse(self):
        return MultiplyByConstantModN(pow(self.c, -1, self.N), self.N)

    def try_merge(self, other):
        if isinstance(other, MultiplyByConstantModN) and other.N == self.N:
            return MultiplyByConstantModN(self.c * other.c % self.N, self.N)
        return NO_MERGE

    def is_identity(self, n_controls=0):
        return self.c == 1


# -- decompositions ---------------------------------------------------------------


def phi_add_angles(width: int, c: int) -> list[float]:
    """Phase angle per qubit that adds ``c`` to a register in the no-swap Fourier basis."""
    out = []
    for i in range(width):
        m = 1 << (i + 1)
        out.append(2 * math.pi * (c % m) / m)
    return out


def phi_add(eng, qureg, c: int) -> None:
    for q, angle in zip(qureg, phi_add_angles(len(qureg), c)):
        gate = R(angle)
        if not gate.is_identity():
            gate | q


def add_constant_rule(eng, qureg, c: int) -> None:
    with Compute(eng):
        QFT | qureg
    phi_add(eng, qureg, c)
    uncompute(eng)


def modN_width(N: int) -> int:
    """Smallest register for the modular adder: ceil(log2 N) + 1 qubits."""
    return (N - 1).bit_length() + 1


def add_constant_modN_rule(eng, qureg, c: int, N: int) -> None:
    """Beauregard's modular adder; the top qubit of ``qureg`` is the overflow bit."""
    if not 0 <= c < N:
        raise GateError(f"modular adder needs 0 <= c < N, got c={c}, N={N}")
    # x + c - N lies in [-N, N): an overflow bit above ceil(log2 N) bits suffices
    if (1 << (len(qureg) - 1)) < N:
        raise GateError(
            f"modular adder for N={N} needs a register of at least {modN_width(N)} qubits"
        )
    AddConstant(c) | qureg
    with Compute(eng):
        SubConstant(N) | qureg
        ancilla = eng.allocate_qubit()
        CNOT | (qureg[-1], ancilla)
        with Control(eng, ancilla):
            AddConstant(N) | qureg
    SubConstant(c) | qureg
    with CustomUncompute(eng):
        X | qureg[-1]
        CNOT | (qureg[-1], ancilla)
        X | qureg[-1]
        ancilla.release()
    AddConstant(c) | qureg


def mul_constant_modN_rule(eng, qureg, c: int, N: int) -> None:
    """x -> c*x mod N through a clean result register and a swap."""
    if math.gcd(c, N) != 1:
        raise GateError(f"modular multiplication needs gcd(c, N) = 1, got c={c}, N={N}")
    n = len(qureg)
    if N > (1 << n):
        raise GateError(f"modulus {N} does not fit a {n}-qubit register")
    result = eng.allocate_qureg(max(modN_width(N), n))
    for i in range(n):
        with Control(eng, qureg[i]):
            AddConstantModN(c * (1 << i) % N, N) | result
    for i in range(n):
        Swap | (result[i], qureg[i])
    c_inv = pow(c, -1, N)
    for i in range(n):
        with Control(eng, qureg[i]):
            SubConstantModN(c_inv * (1 << i) % N, N) | result
    result.release()


def _flat(cmd: BoundCommand):
    from .engine import Qureg

    return Qureg(q for reg in cmd.qubits for q in reg)


def _add_rule(eng, cmd: BoundCommand) -> None:
    add_constant_rule(eng, _flat(cmd), cmd.gate.c)


def _add_modN_rule(eng, cmd: BoundCommand) -> None:
    add_constant_modN_rule(eng, _flat(cmd), cmd.gate.c, cmd.gate.N)


def _mul_rule(eng, cmd: BoundCommand) -> None:
    mul_constant_modN_rule(eng, _flat(cmd), cmd.gate.c, cmd.gate.N)


def register_math_rules(registry: RuleSet) -> None:
    registry.register(DecompositionRule(AddConstant, _add_rule, name="draper"))
    registry.register(DecompositionRule(AddConstantModN, _add_modN_rule, name="beauregard"))
    registry.register(DecompositionRule(MultiplyByConstantModN, _mul_rule, name="mul-modN"))
