"""GHZ state: Entangle on n qubits, then measure all of them."""
from __future__ import annotations

from ..gates import All, Entangle, Measure
from ..runner import Session, bitstring

DEFAULT_QUBITS = 3


def run_entangle(session: Session) -> dict:
    eng = session.eng
    n = session.cfg.qubits or DEFAULT_QUBITS
    qureg = eng.allocate_qureg(n)
    Entangle | qureg
    counts = session.sample(qureg)
    All(Measure) | qureg
    eng.flush()
    outcome = sum(int(q) << k for k, q in enumerate(qureg))
    qureg.release()
    eng.flush()
    if counts is None:
        counts = {outcome: 1}
    return {"qubits": n, "shots": session.cfg.shots,
            "counts": {bitstring(k, n): v for k, v in sorted(counts.items())}}
