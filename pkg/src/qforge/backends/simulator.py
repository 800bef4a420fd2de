"""Dense state-vector simulator back-end with math-gate emulation."""
from __future__ import annotations

import json
import math
from collections import OrderedDict
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from ..engine import BasicEngine, Qubit, as_qubit_list
from ..errors import DeallocationError, MathGateError, SimulationError
from ..gates import (AllocateQubitGate, BasicMathGate, ClassicalInstruction, Command,
                     DeallocateQubitGate, FlushGate, MeasureGate)

DEALLOC_TOL = 1e-12
DEFAULT_FUSE = 4
_TABLE_CACHE_SIZE = 8


class StateVector:
    """Amplitudes over the mapped qubits; qubit id -> bit position.

    New qubits are queued and added in one batch (zero padding) the next time
    the amplitudes are needed. ``lanes`` is the number of threads the kernels
    may use.
    """

    def __init__(self, lanes: int = 1, dealloc_tol: float = DEALLOC_TOL):
        self.psi = np.ones(1, dtype=np.complex128)
        self.pos: dict[int, int] = {}
        self._pending: list[int] = []
        self._scratch: np.ndarray | None = None
        self.lanes = lanes
        self.dealloc_tol = dealloc_tol

    # -- layout ---------------------------------------------------------------

    @property
    def n_qubits(self) -> int:
        return len(self.pos) + len(self._pending)

    @property
    def ids(self) -> list[int]:
        return sorted(list(self.pos) + self._pending)

    def __contains__(self, qid: int) -> bool:
        return qid in self.pos or qid in self._pending

    def _lanes(self) -> None:
        K.set_lanes(self.lanes)

    def materialize(self) -> None:
        if not self._pending:
            return
        n, k = len(self.pos), len(self._pending)
        grown = np.zeros(self.psi.size << k, dtype=np.complex128)
        grown[: self.psi.size] = self.psi
        self.psi = grown
        for i, qid in enumerate(self._pending):
            self.pos[qid] = n + i
        self._pending = []
        self._scratch = None

    def allocate(self, qid: int) -> None:
        if qid in self:
            raise SimulationError(f"qubit {qid} is already allocated")
        self._pending.append(qid)

    def deallocate(self, qid: int) -> None:
        if qid in self._pending:
            self._pending.remove(qid)
            return
        p = self._bit(qid)
        self._lanes()
        mask = np.int64(1) << p
        w1 = K.weight_where(self.psi, mask, mask)
        w0 = K.weight_where(self.psi, mask, np.int64(0))
        if min(w0, w1) > self.dealloc_tol:
            raise DeallocationError(
                f"qubit {qid} is deallocated while in superposition or entangled "
                f"(P(0)={w0:.6g}, P(1)={w1:.6g}); measure or uncompute it first"
            )
        keep = 1 if w1 > w0 else 0
        psi = self.psi.reshape(-1, 2, 1 << p)[:, keep, :].reshape(-1).copy()
        norm = math.sqrt(max(w0, w1))
        if norm > 0 and abs(norm - 1.0) > 1e-15:
            psi /= norm
        self.psi = psi
        self._scratch = None
        del self.pos[qid]
        for q, b in self.pos.items():
            if b > p:
                self.pos[q] = b - 1

    def _bit(self, qid: int) -> int:
        self.materialize()
        try:
            return self.pos[qid]
        except KeyError:
            raise SimulationError(f"qubit {qid} is not allocated in the simulator") from None

    def _mask(self, ids: Iterable[int]) -> np.int64:
        m = 0
        for q in ids:
            m |= 1 << self._bit(q)
        return np.int64(m)

    # -- gates ------------------------------------------------------------------

    def apply_matrix(self, matrix: np.ndarray, targets: Sequence[int], controls: Sequence[int] = ()):
        """Apply a 2x2 or 4x4 unitary. For 4x4, ``targets[0]`` is the high bit of the
        matrix index (textbook ordering)."""
        m = np.ascontiguousarray(matrix, dtype=np.complex128)
        cmask = self._mask(controls)
        self._lanes()
        if m.shape == (2, 2):
            t = self._bit(targets[0])
            if m[0, 1] == 0 and m[1, 0] == 0:
                K.apply_diag(self.psi, m[0, 0], m[1, 1], t, cmask)
            else:
                K.apply_1q(self.psi, m[0, 0], m[0, 1], m[1, 0], m[1, 1], t, cmask)
        elif m.shape == (4, 4):
            hi, lo = self._bit(targets[0]), self._bit(targets[1])
            K.apply_2q(self.psi, m, lo, hi, cmask)
        else:
            raise SimulationError(f"unsupported matrix shape {m.shape}")

    def apply_permutation(self, table: np.ndarray, targets: Sequence[int],
                          controls: Sequence[int] = ()) -> None:
        bits = [self._bit(q) for q in targets]
        cmask = self._mask(controls)
        if self._scratch is None or self._scratch.size != self.psi.size:
            self._scratch = np.empty_like(self.psi)
        self._lanes()
        if bits == list(range(bits[0], bits[0] + len(bits))):
            K.permute_contiguous(self.psi, self._scratch, table, bits[0], len(bits), cmask)
        else:
            K.permute_general(self.psi, self._scratch, table, np.array(bits, dtype=np.int64), cmask)
        self.psi, self._scratch = self._scratch, self.psi

    def measure(self, qid: int, rng: np.random.Generator) -> int:
        p = self._bit(qid)
        mask = np.int64(1) << p
        self._lanes()
        w1 = K.weight_where(self.psi, mask, mask)
        w0 = K.weight_where(self.psi, mask, np.int64(0))
        bit = int(rng.random() < w1 / (w0 + w1))
        weight = w1 if bit else w0
        K.collapse(self.psi, mask, mask if bit else np.int64(0), 1.0 / math.sqrt(weight))
        return bit

    # -- read access ------------------------------------------------------------

    def probability(self, bits: str, ids: Sequence[int]) -> float:
        if len(bits) != len(ids) or set(bits) - {"0", "1"}:
            raise SimulationError(f"bitstring {bits!r} does not match {len(ids)} qubit(s)")
        mask = value = 0
        for b, q in zip(bits, ids):
            bit = 1 << self._bit(q)
            mask |= bit
            if b == "1":
                value |= bit
        self._lanes()
        return float(K.weight_where(self.psi, np.int64(mask), np.int64(value)))

    def index_of(self, bits: str, ids: Sequence[int]) -> int:
        if len(ids) != len(self.pos) + len(self._pending) or set(ids) != set(self.ids):
            raise SimulationError("amplitude lookup needs a bit for every allocated qubit")
        if len(bits) != len(ids) or set(bits) - {"0", "1"}:
            raise SimulationError(f"bitstring {bits!r} does not match {len(ids)} qubit(s)")
        return sum(1 << self._bit(q) for b, q in zip(bits, ids) if b == "1")

    def _axes(self, ids: Sequence[int]) -> list[int]:
        self.materialize()
        n = len(self.pos)
        if sorted(ids) != sorted(self.pos) or len(ids) != n:
            raise SimulationError(
                f"qubit order must list every allocated qubit exactly once: {sorted(self.pos)}"
            )
        # output axis a holds bit n-1-a of the result index, i.e. qubit ids[n-1-a]
        return [n - 1 - self.pos[ids[n - 1 - a]] for a in range(n)]

    def ordered(self, ids: Sequence[int]) -> np.ndarray:
        """Amplitudes re-indexed so that bit k of the index is qubit ``ids[k]``."""
        n = len(ids)
        axes = self._axes(ids)
        if n == 0:
            return self.psi.copy()
        return self.psi.reshape((2,) * n).transpose(axes).reshape(-1).copy()

    def load(self, ids: Sequence[int], vector) -> None:
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        n = len(ids)
        axes = self._axes(ids)
        if vec.size != 1 << n:
            raise SimulationError(f"state needs {1 << n} amplitudes, got {vec.size}")
        norm = float(np.vdot(vec, vec).real)
        if abs(norm - 1.0) > 1e-10:
            raise SimulationError(f"state is not normalized (norm^2 = {norm})")
        inv = np.argsort(axes)
        self.psi = vec.reshape((2,) * n).transpose(inv).reshape(-1).copy() if n else vec.copy()
        self._scratch = None

    def norm(self) -> float:
        self._lanes()
        return float(K.weight_where(self.psi, np.int64(0), np.int64(0)))


def _ids(qubits) -> list[int]:
    if qubits is None:
        return []
    if isinstance(qubits, (int, np.integer)):
        return [int(qubits)]
    out = []
    for item in (qubits if not isinstance(qubits, Qubit) else [qubits]):
        if isinstance(item, (int, np.integer)):
            out.append(int(item))
        else:
            out.extend(q.id for q in as_qubit_list(item))
    return out


class Simulator(BasicEngine):
    """State-vector back-end.

    ``emulate``: run math gates as basis permutations instead of asking for
    their decomposition. ``lanes``: kernel threads. ``fuse``: how many
    consecutive single-qubit gates on one qubit (same controls) are multiplied
    into one matrix before sweeping (1 disables fusion). ``loops``: accept
    loop-tagged bodies and repeat them here instead of having them unrolled.
    Allocation is always clean: a dirty qubit starts in |0>.
    """

    def __init__(self, seed: int | None = None, emulate: bool = True, lanes: int = 1,
                 fuse: int = DEFAULT_FUSE, loops: bool = False,
                 dealloc_tol: float = DEALLOC_TOL):
        super().__init__()
        self.state = StateVector(lanes, dealloc_tol)
        self.rng = np.random.default_rng(seed)
        self.emulate = emulate
        self.fuse = max(1, int(fuse))
        self.loops = loops
        self._fused: list | None = None  # [target, controls, matrix, count]
        self._loop_buffer: list[Command] = []
        self._tables: OrderedDict = OrderedDict()

    def reseed(self, seed: int | None) -> None:
        self.rng = np.random.default_rng(seed)

    # -- engine protocol ----------------------------------------------------------

    def is_available(self, cmd: Command) -> bool:
        gate = cmd.gate
        if isinstance(gate, ClassicalInstruction):
            return True
        if isinstance(gate, BasicMathGate):
            return self.emulate
        m = gate.matrix
        return m is not None and m.shape in ((2, 2), (4, 4)) and m.shape[0] == 1 << len(cmd.targets)

    def supports_loops(self) -> bool:
        return self.loops

    def receive(self, cmd: Command) -> None:
        if self.loops and cmd.loop_tags:
            self._loop_buffer.append(cmd)
            return
        if self._loop_buffer:
            body, self._loop_buffer = self._loop_buffer, []
            self._run_block(body, 0)
        self._execute(cmd)

    def _run_block(self, cmds: list[Command], level: int) -> None:
        i = 0
        while i < len(cmds):
            tags = cmds[i].loop_tags[::-1]  # outermost loop first
            if len(tags) <= level:
                self._execute(cmds[i])
                i += 1
                continue
            tag = tags[level]
            j = i
            while j < len(cmds):
                t = cmds[j].loop_tags[::-1]
                if len(t) <= level or t[level] != tag:
                    break
                j += 1
            for _ in range(tag.iterations):
                self._run_block(cmds[i:j], level + 1)
            i = j

    def _execute(self, cmd: Command) -> None:
        gate = cmd.gate
        if isinstance(gate, AllocateQubitGate):
            self.state.allocate(cmd.targets[0])
        elif isinstance(gate, DeallocateQubitGate):
            self._apply_fused()
            self.state.deallocate(cmd.targets[0])
        elif isinstance(gate, MeasureGate):
            self._apply_fused()
            for q in cmd.targets:
                bit = self.state.measure(q, self.rng)
                if self.main_engine is not None:
                    self.main_engine.record_measurement(cmd, bit)
        elif isinstance(gate, FlushGate):
            self._apply_fused()
        elif isinstance(gate, BasicMathGate):
            self._apply_fused()
            if not self.emulate:
                raise SimulationError(f"{gate} needs emulation (Simulator(emulate=True))")
            targets = list(cmd.targets)
            table = self._table(gate, len(targets))
            self.state.apply_permutation(table, targets, cmd.controls)
        elif gate.matrix is not None:
            m = gate.matrix
            if m.shape == (2, 2) and len(cmd.targets) == 1:
                self._push_1q(cmd.targets[0], cmd.controls, m)
            else:
                self._apply_fused()
                if m.shape[0] != 1 << len(cmd.targets):
                    raise SimulationError(f"{gate} needs {m.shape[0].bit_length() - 1} qubits")
                self.state.apply_matrix(m, cmd.targets, cmd.controls)
        else:
            raise SimulationError(f"the simulator cannot execute {gate}; decompose it first")

    def _push_1q(self, target: int, controls: tuple, m: np.ndarray) -> None:
        f = self._fused
        if f is not None and f[0] == target and f[1] == controls and f[3] < self.fuse:
            f[2] = m @ f[2]
            f[3] += 1
            return
        self._apply_fused()
        if self.fuse == 1:
            self.state.apply_matrix(m, (target,), controls)
        else:
            self._fused = [target, controls, m, 1]

    def _apply_fused(self) -> None:
        f, self._fused = self._fused, None
        if f is not None:
            self.state.apply_matrix(f[2], (f[0],), f[1])

    def _table(self, gate: BasicMathGate, width: int) -> np.ndarray:
        key = (gate, width)
        table = self._tables.get(key)
        if table is not None:
            self._tables.move_to_end(key)
            return table
        table = np.ascontiguousarray(gate.classical_table(width), dtype=np.int64)
        size = 1 << width
        if table.shape != (size,) or table.min() < 0 or table.max() >= size or \
                np.bincount(table, minlength=size).max() != 1:
            raise MathGateError(f"math gate not reversible: {gate} on {width} qubit(s)")
        self._tables[key] = table
        if len(self._tables) > _TABLE_CACHE_SIZE:
            self._tables.popitem(last=False)
        return table

    # -- read access ----------------------------------------------------------------

    def sync(self) -> StateVector:
        """Apply anything held back (fusion, lazy allocation) and return the state."""
        if self._loop_buffer:
            body, self._loop_buffer = self._loop_buffer, []
            self._run_block(body, 0)
        self._apply_fused()
        self.state.materialize()
        return self.state

    def _order(self, qubits) -> list[int]:
        ids = _ids(qubits)
        return ids if ids else self.sync().ids

    def amplitude(self, bits: str, qubits=None) -> complex:
        """Amplitude of the basis state with ``bits[k]`` on qubit ``qubits[k]``
        (default: every allocated qubit by increasing id)."""
        state = self.sync()
        ids = self._order(qubits)
        return complex(state.psi[state.index_of(bits, ids)])

    def probability(self, bits: str, qubits=None) -> float:
        state = self.sync()
        return state.probability(bits, self._order(qubits))

    def statevector(self, qubits=None) -> np.ndarray:
        """Copy of the state; bit k of the index is qubit ``qubits[k]``."""
        state = self.sync()
        return state.ordered(self._order(qubits))

    def set_state(self, qubits, vector) -> None:
        state = self.sync()
        state.load(self._order(qubits), vector)

    def sample(self, qubits, shots: int) -> dict[int, int]:
        """Outcome counts of measuring ``qubits`` ``shots`` times, without collapsing.

        Outcome integers have bit k set when ``qubits[k]`` reads 1.
        """
        state = self.sync()
        ids = self._order(qubits)
        probs = np.abs(state.psi) ** 2
        idx = np.arange(state.psi.size, dtype=np.int64)
        vals = np.zeros(state.psi.size, dtype=np.int64)
        for k, q in enumerate(ids):
            vals |= ((idx >> state.pos[q]) & 1) << k
        marginal = np.bincount(vals, weights=probs, minlength=1 << len(ids))
        marginal = marginal / marginal.sum()
        counts = self.rng.multinomial(int(shots), marginal)
        return {int(v): int(c) for v, c in enumerate(counts) if c}

    def dump_state(self, path=None, qubits=None) -> str:
        """JSON with the qubit order and one ``[bitstring, re, im]`` row per nonzero amplitude.

        Character k of a bitstring is qubit ``qubits[k]``.
        """
        ids = self._order(qubits)
        vec = self.statevector(ids)
        rows = []
        for i in np.flatnonzero(vec):
            bits = "".join("1" if (int(i) >> k) & 1 else "0" for k in range(len(ids)))
            rows.append([bits, float(vec[i].real), float(vec[i].imag)])
        text = json.dumps({"qubits": ids, "amplitudes": rows})
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text
