"""Quantum teleportation of a random single-qubit state."""
from __future__ import annotations

import numpy as np

from ..gates import CNOT, H, Measure, Ry, Rz, X, Z
from ..meta import Control
from ..runner import Session


def prepared_state(theta: float, phi: float) -> np.ndarray:
    """Rz(phi) Ry(theta) |0>."""
    return Rz(phi).matrix @ Ry(theta).matrix @ np.array([1, 0], dtype=complex)


def teleport(eng, theta: float, phi: float, feedback: str = "quantum"):
    """Send Rz(phi) Ry(theta)|0> from psi to b2; returns (b2, (m_psi, m_b1)).

    ``feedback="quantum"`` applies Bob's corrections as gates controlled by the
    measured qubits; ``"classical"`` branches on the measurement bits instead.
    Both measured qubits are released before returning.
    """
    b1 = eng.allocate_qubit()
    b2 = eng.allocate_qubit()
    H | b1
    CNOT | (b1, b2)

    psi = eng.allocate_qubit()
    Ry(theta) | psi
    Rz(phi) | psi

    CNOT | (psi, b1)
    H | psi
    Measure | psi
    Measure | b1
    if feedback == "classical":
        eng.flush()
        m_psi, m_b1 = int(psi[0]), int(b1[0])
        if m_b1:
            X | b2
        if m_psi:
            Z | b2
    else:
        with Control(eng, b1):
            X | b2
        with Control(eng, psi):
            Z | b2
        eng.flush()
        m_psi, m_b1 = int(psi[0]), int(b1[0])
    psi.release()
    b1.release()
    eng.flush()
    return b2, (m_psi, m_b1)


def run_teleport(session: Session) -> dict:
    """``shots`` independent trials, each with a fresh random state."""
    eng, rng = session.eng, session.rng
    fidelities, messages = [], []
    trials = session.cfg.shots if session.simulating else 1
    for _ in range(trials):
        theta, phi = rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)
        b2, message = teleport(eng, theta, phi, session.cfg.feedback)
        messages.append(list(message))
        if session.simulating:
            session.dump()
            bob = session.backend.statevector(session.sim_ids(b2))
            fidelities.append(float(abs(np.vdot(prepared_state(theta, phi), bob)) ** 2))
        Measure | b2
        b2.release()
        eng.flush()
    return {"trials": trials, "messages": messages, "fidelities": fidelities,
            "min_fidelity": min(fidelities) if fidelities else None}
