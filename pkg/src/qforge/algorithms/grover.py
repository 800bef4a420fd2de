"""Grover search for a single marked element."""
from __future__ import annotations

import math

from ..gates import All, H, Measure, X, Z
from ..meta import Compute, Control, Loop, uncompute
from ..runner import ConfigError, Session, bitstring

DEFAULT_QUBITS = 7


def marked_default(n: int) -> int:
    """Alternating pattern 1010...1 read from the top bit: bits 0, 2, 4, ... set."""
    return sum(1 << i for i in range(0, n, 2))


def grover_iterations(n: int) -> int:
    return int(math.floor(math.pi / 4 * math.sqrt(2 ** n)))


def success_probability(n: int, k: int | None = None) -> float:
    k = grover_iterations(n) if k is None else k
    theta = math.asin(2 ** (-n / 2))
    return math.sin((2 * k + 1) * theta) ** 2


def oracle(eng, x, marked: int) -> None:
    """Phase -1 on |marked>: multi-controlled Z between X gates on its zero bits."""
    with Compute(eng):
        for i, q in enumerate(x):
            if not (marked >> i) & 1:
                X | q
    with Control(eng, x[:-1]):
        Z | x[-1]
    uncompute(eng)


def grover_search(eng, x, marked: int, iterations: int | None = None) -> None:
    """Leave ``x`` in the amplified state (no measurement)."""
    n = len(x)
    if n < 2:
        raise ConfigError("grover needs at least 2 qubits")
    k = grover_iterations(n) if iterations is None else iterations
    All(H) | x
    with Loop(eng, k):
        oracle(eng, x, marked)
        with Compute(eng):
            All(H) | x
            All(X) | x
        with Control(eng, x[:-1]):
            Z | x[-1]
        uncompute(eng)


def run_grover(session: Session) -> dict:
    eng, cfg = session.eng, session.cfg
    n = cfg.qubits or DEFAULT_QUBITS
    marked = marked_default(n) if cfg.marked is None else cfg.marked
    if not 0 <= marked < 1 << n:
        raise ConfigError(f"marked element {marked} does not fit in {n} bits")
    k = grover_iterations(n)
    x = eng.allocate_qureg(n)
    grover_search(eng, x, marked, k)
    counts = session.sample(x)
    All(Measure) | x
    eng.flush()
    found = sum(int(q) << i for i, q in enumerate(x))
    x.release()
    eng.flush()
    if counts is None:
        counts = {found: 1}
    hits = counts.get(marked, 0)
    return {"qubits": n, "marked": bitstring(marked, n), "iterations": k,
            "found": bitstring(found, n), "shots": cfg.shots, "hits": hits,
            "success_rate": hits / cfg.shots, "predicted": success_probability(n, k)}
