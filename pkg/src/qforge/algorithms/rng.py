"""One random bit from a Hadamard and a measurement."""
from __future__ import annotations

from ..gates import H, Measure
from ..runner import Session, bitstring


def random_bit(eng) -> int:
    qubit = eng.allocate_qubit()
    H | qubit
    Measure | qubit
    # release before flushing so the back-end sees Allocate, H, Measure, Deallocate, Flush
    qubit.release()
    eng.flush()
    return int(qubit[0])


def run_rng(session: Session) -> dict:
    eng = session.eng
    qubit = eng.allocate_qubit()
    H | qubit
    counts = session.sample(qubit)
    Measure | qubit
    qubit.release()
    eng.flush()
    bit = int(qubit[0])
    if counts is None:
        return {"bit": bit}
    return {"bit": bit, "shots": session.cfg.shots,
            "counts": {bitstring(k, 1): v for k, v in sorted(counts.items())}}
