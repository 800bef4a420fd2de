import math

import numpy as np
import pytest

from qforge import (QFT, AddConstant, All, CNOT, CommandError, Compute, Control, CustomUncompute,
                    Dagger, H, Loop, MainEngine, Measure, R, Rx, S, ScopeError, Uncompute, X, Z)
from qforge.backends import CommandPrinter, ResourceCounter, Simulator
from qforge.errors import DeallocationError
from qforge.gates import ComputeTag, LoopTag, UncomputeTag

from oracle import equal_up_to_phase, gates_only, random_state, recorder


def test_control_single_x_is_cnot():
    eng, rec = recorder()
    c, q = eng.allocate_qubit(), eng.allocate_qubit()
    with Control(eng, c):
        X | q
    assert str(rec.commands[-1]) == "X | [1] ; ctrl=[0]"


def test_nested_control_accumulates():
    eng, rec = recorder()
    a, b, q = eng.allocate_qubit(), eng.allocate_qubit(), eng.allocate_qubit()
    with Control(eng, a):
        with Control(eng, b):
            X | q
    assert rec.commands[-1].controls == (0, 1)


def test_duplicate_control_collapses():
    eng, rec = recorder()
    a, q = eng.allocate_qubit(), eng.allocate_qubit()
    with Control(eng, a):
        with Control(eng, a):
            X | q
    assert rec.commands[-1].controls == (0,)


def test_control_target_overlap_is_error():
    eng, _ = recorder()
    a = eng.allocate_qubit()
    with pytest.raises(CommandError):
        with Control(eng, a):
            X | a


def test_control_skips_compute_and_uncompute():
    eng, rec = recorder()
    c = eng.allocate_qubit()
    r = eng.allocate_qureg(3)
    with Control(eng, c):
        with Compute(eng):
            QFT | r
        R(0.5) | r[0]
        Uncompute(eng)
    cmds = gates_only(rec.commands)
    assert [str(x.gate) for x in cmds] == ["QFT", "R(0.5)", "QFT†"]
    assert cmds[0].controls == () and cmds[0].has_tag(ComputeTag)
    assert cmds[1].controls == (0,)
    assert cmds[2].controls == () and cmds[2].has_tag(UncomputeTag)


def test_compute_uncompute_h_round_trip():
    eng, rec = recorder()
    q = eng.allocate_qubit()
    with Compute(eng):
        H | q
    Uncompute(eng)
    cmds = gates_only(rec.commands)
    assert [c.gate for c in cmds] == [H, H]
    assert cmds[0].has_tag(ComputeTag) and cmds[1].has_tag(UncomputeTag)


def test_uncompute_reverses_and_inverts():
    eng, rec = recorder()
    q = eng.allocate_qureg(2)
    with Compute(eng):
        Rx(0.3) | q[0]
        S | q[1]
        CNOT | (q[0], q[1])
    Uncompute(eng)
    cmds = gates_only(rec.commands)
    fwd, back = cmds[:3], cmds[3:]
    assert [c.inverse().gate for c in reversed(fwd)] == [c.gate for c in back]
    assert [c.all_ids for c in reversed(fwd)] == [c.all_ids for c in back]
    assert back[-1].gate == Rx(4 * math.pi - 0.3)


def test_compute_rx_round_trip_on_simulator():
    sim = Simulator(seed=0)
    eng = MainEngine(sim, [])
    q = eng.allocate_qureg(2)
    psi = random_state(2, np.random.default_rng(3))
    sim.set_state(q, psi)
    with Compute(eng):
        Rx(0.3) | q[0]
        CNOT | (q[0], q[1])
    Uncompute(eng)
    assert np.max(abs(sim.statevector(q) - psi)) < 1e-12


def test_measure_in_compute_and_double_uncompute():
    eng, _ = recorder()
    q = eng.allocate_qubit()
    with pytest.raises(ScopeError):
        with Compute(eng):
            Measure | q
    with Compute(eng):
        H | q
    Uncompute(eng)
    with pytest.raises(ScopeError):
        Uncompute(eng)


def test_compute_allocated_ancilla_released_by_uncompute():
    eng, rec = recorder()
    q = eng.allocate_qubit()
    with Compute(eng):
        anc = eng.allocate_qubit()
        CNOT | (q, anc)
    Uncompute(eng)
    assert anc[0].released
    assert str(rec.commands[-1]).startswith("Deallocate | [1]")
    anc.release()  # no second Deallocate
    assert sum(c.gate.name == "Deallocate" for c in rec.commands) == 1


def test_custom_uncompute_needs_compute():
    eng, _ = recorder()
    with pytest.raises(ScopeError):
        with CustomUncompute(eng):
            pass


def test_empty_custom_uncompute_is_noop():
    eng, rec = recorder()
    eng.allocate_qubit()
    n = len(rec.commands)
    with Compute(eng):
        pass
    with CustomUncompute(eng):
        pass
    assert len(rec.commands) == n


def test_custom_uncompute_tags_commands():
    eng, rec = recorder()
    q = eng.allocate_qubit()
    with Compute(eng):
        H | q
    with CustomUncompute(eng):
        H | q
    assert rec.commands[-1].has_tag(UncomputeTag)


def test_broken_custom_uncompute_caught_by_simulator():
    eng = MainEngine(Simulator(seed=0), [])
    q = eng.allocate_qubit()
    H | q
    with Compute(eng):
        anc = eng.allocate_qubit()
        CNOT | (q, anc)
    with pytest.raises(DeallocationError):
        with CustomUncompute(eng):
            anc.release()  # forgot to undo the CNOT


def test_dagger_reverses_and_inverts():
    eng, rec = recorder()
    q = eng.allocate_qubit()
    with Dagger(eng):
        H | q
        S | q
    assert [str(c.gate) for c in gates_only(rec.commands)] == ["S†", "H"]


def test_dagger_twice_is_original():
    def body(eng, r):
        H | r[0]
        Rx(0.4) | r[1]
        CNOT | (r[0], r[1])

    eng1, rec1 = recorder()
    r1 = eng1.allocate_qureg(2)
    body(eng1, r1)
    eng2, rec2 = recorder()
    r2 = eng2.allocate_qureg(2)
    with Dagger(eng2):
        with Dagger(eng2):
            body(eng2, r2)
    assert [str(c) for c in rec1.commands] == [str(c) for c in rec2.commands]


def test_dagger_qft_cancels_on_simulator():
    sim = Simulator(seed=0)
    eng = MainEngine(sim)
    r = eng.allocate_qureg(3)
    psi = random_state(3, np.random.default_rng(5))
    sim.set_state(r, psi)
    with Dagger(eng):
        QFT | r
    QFT | r
    assert equal_up_to_phase(sim.statevector(r), psi, 1e-10)


def test_dagger_rejects_measure_and_unbalanced_allocation():
    eng, _ = recorder()
    q = eng.allocate_qubit()
    with pytest.raises(ScopeError):
        with Dagger(eng):
            Measure | q
    with pytest.raises(ScopeError):
        with Dagger(eng):
            kept = eng.allocate_qubit()  # a dropped handle would release itself
            assert kept


def test_loop_one_is_plain_body():
    eng, rec = recorder()
    q = eng.allocate_qubit()
    with Loop(eng, 1):
        H | q
    assert not rec.commands[-1].loop_tags


def test_loop_unrolls_without_support():
    eng, rec = recorder()
    q = eng.allocate_qubit()
    with Loop(eng, 8):
        X | q
        H | q
    assert [c.gate for c in gates_only(rec.commands)] == [X, H] * 8


def test_loop_fresh_ids_for_inner_allocations():
    eng, rec = recorder()
    with Loop(eng, 3):
        a = eng.allocate_qubit()
        a.release()
    ids = [c.targets[0] for c in rec.commands if c.gate.name == "Allocate"]
    assert len(set(ids)) == 3


def test_loop_tagged_for_counter():
    counter = ResourceCounter()
    eng = MainEngine(counter, [])
    q = eng.allocate_qubit()
    with Loop(eng, 8):
        X | q
    eng.flush()
    assert counter.report.count("X") == 8


def test_loop_zero_rejected():
    eng, _ = recorder()
    with pytest.raises(ScopeError):
        Loop(eng, 0)


def test_loop_tagged_and_unrolled_states_agree():
    def program(sim):
        eng = MainEngine(sim, [])
        r = eng.allocate_qureg(3)
        All(H) | r
        with Loop(eng, 5):
            Rx(0.3) | r[0]
            CNOT | (r[0], r[1])
            with Control(eng, r[1]):
                Z | r[2]
        eng.flush()
        return sim.statevector(r)

    a = program(Simulator(seed=0, loops=True))
    b = program(Simulator(seed=0, loops=False))
    assert np.max(abs(a - b)) < 1e-12


def test_loop_tags_carry_iterations():
    class LoopPrinter(CommandPrinter):
        def supports_loops(self):
            return True

    lp = LoopPrinter()
    eng = MainEngine(lp, [])
    q = eng.allocate_qubit()
    with Loop(eng, 4):
        H | q
    assert lp.commands[-1].loop_tags[0].iterations == 4
    assert isinstance(lp.commands[-1].loop_tags[0], LoopTag)


def _control_reference(body, n, control_state):
    """State after body under Control(c) with c prepared in ``control_state``."""
    sim = Simulator(seed=0)
    eng = MainEngine(sim)
    c = eng.allocate_qubit()
    r = eng.allocate_qureg(n)
    psi = random_state(n, np.random.default_rng(9))
    sim.set_state(list(r) + list(c), np.kron(control_state, psi))
    with Control(eng, c):
        body(eng, r)
    eng.flush()
    return sim.statevector(list(r) + list(c)), psi


def _body(eng, r):
    with Compute(eng):
        QFT | r
    R(0.7) | r[0]
    R(1.3) | r[2]
    Uncompute(eng)
    AddConstant(3) | r


def test_control_with_uncontrolled_compute_on_zero_and_one():
    # control |0>: register unchanged even though QFT and QFT† ran unconditionally
    out, psi = _control_reference(_body, 3, np.array([1, 0]))
    assert equal_up_to_phase(out, np.kron([1, 0], psi))
    # control |1>: same as running the body directly
    out1, psi = _control_reference(_body, 3, np.array([0, 1]))
    sim = Simulator(seed=0)
    eng = MainEngine(sim)
    r = eng.allocate_qureg(3)
    sim.set_state(r, psi)
    _body(eng, r)
    eng.flush()
    assert equal_up_to_phase(out1, np.kron([0, 1], sim.statevector(r)))
