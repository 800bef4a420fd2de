"""Random circuits and the decompose -> optimize -> map soundness trial."""
import itertools
import math

import numpy as np

from qforge import (CNOT, CZ, AddConstant, Control, H, MainEngine, R, Rx, Ry, Rz, S, Sdag, Swap, T,
                    Tdag, Toffoli, X, Y, Z)
from qforge.backends import CommandPrinter, Simulator
from qforge.passes import AutoReplacer, CouplingGraph, CouplingMapper, InstructionFilter, LocalOptimizer
from qforge.setups import one_qubit_and_cnot

from oracle import Reference

FIXED = [H, X, Y, Z, S, Sdag, T, Tdag]
ROTATIONS = [Rx, Ry, Rz, R]
# room for decomposition ancillas too, which the mapper does not recycle
TRIVIAL_NODES = 40
MATH = {"AddConstant": lambda g, w: lambda x: (x + g.c) % (1 << w)}


def complete_graph(n):
    return CouplingGraph(range(n), itertools.permutations(range(n), 2))


def random_program(eng, qs, rng, depth):
    """Mixed circuit: fixed and rotation gates, CNOT/CZ/Swap/Toffoli, multi-controlled
    rotations, small adders, and gates repeated or inverted so the optimizer has work."""
    n = len(qs)
    pick = lambda k: [qs[i] for i in rng.choice(n, k, replace=False)]  # noqa: E731
    for _ in range(depth):
        kind = int(rng.integers(9))
        if kind == 0:
            FIXED[rng.integers(len(FIXED))] | pick(1)[0]
        elif kind == 1:
            gate = ROTATIONS[rng.integers(4)](float(rng.choice([rng.uniform(-7, 7), math.pi / 2])))
            gate | pick(1)[0]
        elif kind == 2 and n >= 2:
            (CNOT, CZ, Swap)[rng.integers(3)] | tuple(pick(2))
        elif kind == 3 and n >= 3:
            Toffoli | tuple(pick(3))
        elif kind == 4 and n >= 2:
            k = int(rng.integers(1, min(3, n - 1) + 1))
            wires = pick(k + 1)
            with Control(eng, wires[:k]):
                ROTATIONS[rng.integers(4)](float(rng.uniform(-7, 7))) | wires[k]
        elif kind == 5 and n >= 2:
            w = int(rng.integers(2, min(3, n) + 1))
            AddConstant(int(rng.integers(0, 1 << w))) | pick(w)
        elif kind == 6:
            q = pick(1)[0]
            g = ROTATIONS[rng.integers(4)](float(rng.uniform(-7, 7)))
            g | q
            g.inverse() | q  # cancels in the optimizer
        elif kind == 7 and n >= 2:
            a, b = pick(2)
            CNOT | (a, b)
            CNOT | (a, b)
        else:
            q = pick(1)[0]
            Rz(0.3) | q
            Rz(0.4) | q  # merges


def soundness_trial(seed, max_qubits=5, depth=25):
    """Run one random circuit through decompose -> optimize -> trivial map on the
    simulator; returns (max deviation up to global phase, commands into the
    optimizer, commands out of it)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_qubits + 1))
    logical = CommandPrinter()
    pre, post = CommandPrinter(), CommandPrinter()
    sim = Simulator(seed=seed)
    engines = [logical, AutoReplacer(), InstructionFilter(one_qubit_and_cnot), pre,
               LocalOptimizer(), post, CouplingMapper(complete_graph(TRIVIAL_NODES))]
    eng = MainEngine(sim, engines)
    qs = eng.allocate_qureg(n)
    random_program(eng, list(qs), rng, depth)
    eng.flush()
    ids = [q.id for q in qs]
    want = Reference(MATH).run(logical.commands).ordered(ids)
    got = sim.statevector(eng.physical_ids(ids))
    overlap = np.vdot(want, got)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
    dev = float(np.max(abs(got - phase * want)))
    return dev, len(pre.commands), len(post.commands)
