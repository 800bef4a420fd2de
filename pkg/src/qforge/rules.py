"""Built-in decomposition rules for the standard gate catalog."""
from __future__ import annotations

import cmath
import math

import numpy as np

from .gates import (CNOT, DaggeredGate, EntangleGate, H, MatrixGate, QFTGate, R, Rx, Ry, Rz,
                    S, Sdag, T, Tdag, Toffoli, X, _AngleGate, _emit, All)
from .meta import Compute, Control, Dagger, uncompute
from .passes.replacer import BoundCommand, DecompositionRule, RuleSet


def _n_controls(n):
    return lambda cmd: len(cmd.controls) == n


def _is_single_qubit_unitary(gate) -> bool:
    m = gate.matrix
    return m is not None and m.shape == (2, 2)


# -- compound gates ----------------------------------------------------------


def _entangle(eng, cmd: BoundCommand) -> None:
    qureg = [q for reg in cmd.qubits for q in reg]
    H | qureg[0]
    if len(qureg) > 1:
        with Control(eng, qureg[0]):
            All(X) | qureg[1:]


def qft_rule(eng, qureg) -> None:
    """QFT without the final bit-reversal swaps."""
    n = len(qureg)
    for j in range(n - 1, -1, -1):
        H | qureg[j]
        for k in range(j - 1, -1, -1):
            with Control(eng, qureg[k]):
                R(math.pi / (1 << (j - k))) | qureg[j]


def _qft(eng, cmd: BoundCommand) -> None:
    qft_rule(eng, [q for reg in cmd.qubits for q in reg])


def _dagger(eng, cmd: BoundCommand) -> None:
    from .passes.replacer import default_rules

    inner = cmd.command.with_gate(cmd.gate.gate).with_controls(())
    inner = type(inner)(inner.gate, inner.qubits)
    rules = [r for r in default_rules().rules_for(inner.gate) if r.recognizer(inner)]
    if not rules:
        from .errors import DecompositionError

        raise DecompositionError(f"no decomposition found for {inner.gate} (inverting {cmd.gate})")
    with Dagger(eng):
        rules[0].decompose(eng, BoundCommand(inner.gate, cmd.qubits, eng.qubit_refs(()), inner))


def _swap(eng, cmd: BoundCommand) -> None:
    a, b = [q for reg in cmd.qubits for q in reg]
    with Compute(eng):
        CNOT | (b, a)
    CNOT | (a, b)
    uncompute(eng)


# -- control handling ----------------------------------------------------------


def _toffoli(eng, cmd: BoundCommand) -> None:
    c0, c1 = cmd.controls
    t = cmd.qubits[0][0]
    H | t
    CNOT | (c1, t)
    Tdag | t
    CNOT | (c0, t)
    T | t
    CNOT | (c1, t)
    Tdag | t
    CNOT | (c0, t)
    T | c1
    T | t
    H | t
    CNOT | (c0, c1)
    T | c0
    Tdag | c1
    CNOT | (c0, c1)


def _reduce_controls(eng, cmd: BoundCommand) -> None:
    """Fold the first two controls into a clean ancilla (computed, then uncomputed)."""
    ctrls = list(cmd.controls)
    with Compute(eng):
        ancilla = eng.allocate_qubit()
        Toffoli | (ctrls[0], ctrls[1], ancilla)
    with Control(eng, [ancilla[0]] + ctrls[2:]):
        _emit(cmd.gate, cmd.qubits)
    uncompute(eng)


def _reducible(cmd) -> bool:
    if len(cmd.controls) < 2 or not _is_single_qubit_unitary(cmd.gate):
        return False
    return not (cmd.gate == X and len(cmd.controls) == 2)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """(alpha, beta, gamma, delta) with u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)."""
    alpha = cmath.phase(np.linalg.det(u)) / 2
    v = u * cmath.exp(-1j * alpha)
    gamma = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) > 1e-12 and abs(v[1, 0]) > 1e-12:
        plus = 2 * cmath.phase(v[1, 1])
        minus = 2 * cmath.phase(v[1, 0])
    elif abs(v[1, 0]) <= 1e-12:
        plus, minus = 2 * cmath.phase(v[1, 1]), 0.0
    else:
        plus, minus = 0.0, 2 * cmath.phase(v[1, 0])
    beta, delta = (plus + minus) / 2, (plus - minus) / 2
    return alpha, beta, gamma, delta


def _controlled_abc(eng, cmd: BoundCommand) -> None:
    """Any controlled single-qubit unitary as C . CNOT . B . CNOT . A plus a phase."""
    ctrl = cmd.controls[0]
    t = cmd.qubits[0][0]
    alpha, beta, gamma, delta = zyz_angles(cmd.gate.matrix)

    def rot(gate_cls, angle):
        g = gate_cls(angle)
        if not g.is_identity(1):
            g | t

    rot(Rz, (delta - beta) / 2)                    # C
    CNOT | (ctrl, t)
    rot(Rz, -(delta + beta) / 2)                   # B
    rot(Ry, -gamma / 2)
    CNOT | (ctrl, t)
    rot(Ry, gamma / 2)                             # A
    rot(Rz, beta)
    if not R(alpha).is_identity(1):
        R(alpha) | ctrl


def _crz(eng, cmd: BoundCommand) -> None:
    ctrl, t = cmd.controls[0], cmd.qubits[0][0]
    theta = cmd.gate.angle
    Rz(theta / 2) | t
    CNOT | (ctrl, t)
    Rz(-theta / 2) | t
    CNOT | (ctrl, t)


def _cr(eng, cmd: BoundCommand) -> None:
    ctrl = cmd.controls[0]
    R(cmd.gate.angle / 2) | ctrl
    _crz(eng, cmd._replace(gate=Rz(cmd.gate.angle)))


# -- single-qubit rewrites (exact unless noted) --------------------------------


def _as_phase(angle):
    def body(eng, cmd: BoundCommand) -> None:
        R(angle) | cmd.qubits[0]
    return body


def _y(eng, cmd):
    q = cmd.qubits[0]
    Sdag | q
    X | q
    S | q


def _x(eng, cmd):
    q = cmd.qubits[0]
    H | q
    R(math.pi) | q
    H | q


def _rx(eng, cmd):
    q = cmd.qubits[0]
    H | q
    Rz(cmd.gate.angle) | q
    H | q


def _ry(eng, cmd):
    q = cmd.qubits[0]
    Sdag | q
    Rx(cmd.gate.angle) | q
    S | q


def _r_to_rz(eng, cmd):
    # drops the global phase e^{i angle/2}; uncontrolled only
    Rz(cmd.gate.angle) | cmd.qubits[0]


def _rz_to_r(eng, cmd):
    R(cmd.gate.angle) | cmd.qubits[0]


def _gate_is(gate):
    return lambda cmd: cmd.gate == gate


def register_builtin_rules(registry: RuleSet) -> None:
    reg = registry.register
    reg(DecompositionRule(EntangleGate, _entangle, name="entangle"))
    reg(DecompositionRule(QFTGate, _qft, name="qft"))
    reg(DecompositionRule(DaggeredGate, _dagger, name="dagger"))
    reg(DecompositionRule(MatrixGate, _swap, lambda c: c.gate.name == "Swap", name="swap"))

    reg(DecompositionRule(MatrixGate, _toffoli,
                          lambda c: c.gate == X and len(c.controls) == 2,
                          handles_controls=True, name="toffoli"))
    for klass in (MatrixGate, _AngleGate, DaggeredGate):
        reg(DecompositionRule(klass, _reduce_controls, _reducible, handles_controls=True,
                              name="reduce-controls"))
        reg(DecompositionRule(
            klass, _controlled_abc,
            lambda c: len(c.controls) == 1 and _is_single_qubit_unitary(c.gate) and c.gate != X,
            handles_controls=True, name="controlled-abc"))
    reg(DecompositionRule(Rz, _crz, _n_controls(1), handles_controls=True, name="crz"))
    reg(DecompositionRule(R, _cr, _n_controls(1), handles_controls=True, name="cr"))

    single = lambda gate: (lambda c: c.gate == gate and len(c.controls) == 0)  # noqa: E731
    for gate, angle in (("Z", math.pi), ("S", math.pi / 2), ("T", math.pi / 4)):
        reg(DecompositionRule(MatrixGate, _as_phase(angle), lambda c, g=gate: c.gate.name == g,
                              name=f"{gate}-phase"))
    reg(DecompositionRule(DaggeredGate, _as_phase(-math.pi / 2), _gate_is(Sdag), name="Sdag-phase"))
    reg(DecompositionRule(DaggeredGate, _as_phase(-math.pi / 4), _gate_is(Tdag), name="Tdag-phase"))
    reg(DecompositionRule(MatrixGate, _y, lambda c: c.gate.name == "Y", name="y"))
    reg(DecompositionRule(MatrixGate, _x, single(X), name="x-hzh"))
    reg(DecompositionRule(Rx, _rx, name="rx"))
    reg(DecompositionRule(Ry, _ry, name="ry"))
    reg(DecompositionRule(R, _r_to_rz, _n_controls(0), name="r-rz"))
    reg(DecompositionRule(Rz, _rz_to_r, _n_controls(0), name="rz-r"))
