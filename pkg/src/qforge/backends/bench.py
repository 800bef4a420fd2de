"""Kernel throughput benchmark: H on every qubit, a chain of controlled Rz,
H on every qubit again, timed at different lane counts."""
from __future__ import annotations

import argparse
import json
import time

import numpy as np

from ..gates import H, Rz
from . import _kernels as K
from .simulator import StateVector


def bench_circuit(n: int):
    """(matrix, targets, controls) triples; the Rz angles are fixed so runs compare."""
    ops = [(H.matrix, (q,), ()) for q in range(n)]
    ops += [(Rz(0.1 + 0.37 * q).matrix, (q + 1,), (q,)) for q in range(n - 1)]
    ops += [(H.matrix, (q,), ()) for q in range(n)]
    return ops


def run_bench(n: int = 26, lanes: int = 1) -> tuple[float, np.ndarray]:
    """Seconds spent applying the gates and the final state."""
    state = StateVector(lanes=lanes)
    for q in range(n):
        state.allocate(q)
    state.materialize()
    ops = bench_circuit(n)
    state.apply_matrix(*ops[0])  # compiled kernels load before timing starts
    state.apply_matrix(*ops[0])
    t0 = time.perf_counter()
    for m, targets, controls in ops:
        state.apply_matrix(m, targets, controls)
    return time.perf_counter() - t0, state.psi


def compare_lanes(n: int = 26, lanes: int = 4) -> dict:
    t1, psi1 = run_bench(n, 1)
    tk, psik = run_bench(n, lanes)
    diff = float(np.max(np.abs(psi1 - psik)))
    return {"qubits": n, "lanes": lanes, "available_lanes": K.max_lanes(), "t1": t1, "tk": tk,
            "speedup": t1 / tk, "max_abs_diff": diff}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--qubits", type=int, default=26)
    p.add_argument("--lanes", type=int, default=4)
    args = p.parse_args(argv)
    print(json.dumps(compare_lanes(args.qubits, args.lanes)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
