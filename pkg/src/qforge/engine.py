"""Qubit handles, the engine base class and the front-end ``MainEngine``."""
from __future__ import annotations

import logging
import weakref
from typing import Callable, Iterable, Sequence

from .errors import LifetimeError, MeasurementError, QForgeError
from .gates import (Allocate, Command, Deallocate, DirtyTag, Flush, LogicalQubitTag,
                    MeasureGate)

log = logging.getLogger(__name__)


class Qubit:
    """Handle to one logical qubit.

    Owning handles emit a Deallocate exactly once: on :meth:`release` or when
    the handle is garbage collected. Non-owning handles (``owned=False``) are
    views handed to decomposition rules and never deallocate.
    """

    __slots__ = ("id", "engine", "dirty", "_owned", "_released", "__weakref__")

    def __init__(self, engine: "MainEngine", qubit_id: int, dirty: bool = False,
                 owned: bool = True):
        self.id = qubit_id
        self.engine = engine
        self.dirty = dirty
        self._owned = owned
        self._released = False

    @property
    def released(self) -> bool:
        return self._released

    def release(self) -> None:
        if self._owned and not self._released:
            self._released = True
            self.engine._deallocate(self)

    def __del__(self):
        if getattr(self, "_owned", False) and not self._released:
            self._released = True
            try:
                self.engine._deallocate(self)
            except Exception as exc:  # cannot propagate out of __del__
                try:
                    self.engine._defer_error(exc)
                except Exception:
                    pass

    def __int__(self) -> int:
        return self.engine.get_measurement(self)

    def __bool__(self) -> bool:
        return bool(int(self))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Qubit) and other.id == self.id and other.engine is self.engine

    def __hash__(self) -> int:
        return hash((id(self.engine), self.id))

    def __repr__(self) -> str:
        return f"Qubit({self.id})"


class Qureg(list):
    """Ordered list of qubits; index 0 is the least significant bit."""

    def __init__(self, qubits: Iterable[Qubit] = ()):
        super().__init__(qubits)
        ids = [q.id for q in self]
        if len(set(ids)) != len(ids):
            raise LifetimeError(f"duplicate qubit in register {ids}")

    def __getitem__(self, item):
        got = super().__getitem__(item)
        return Qureg(got) if isinstance(item, slice) else got

    @property
    def ids(self) -> list[int]:
        return [q.id for q in self]

    @property
    def engine(self) -> "MainEngine":
        return self[0].engine

    def __int__(self) -> int:
        return sum(int(q) << i for i, q in enumerate(self))

    def release(self) -> None:
        for q in self:
            q.release()

    def __repr__(self) -> str:
        return f"Qureg({self.ids})"


def as_qubit_list(qubits) -> list[Qubit]:
    if isinstance(qubits, Qubit):
        return [qubits]
    out = []
    for item in qubits:
        out.extend(as_qubit_list(item) if not isinstance(item, Qubit) else [item])
    return out


class BasicEngine:
    """One stage of the compiler chain.

    The default behaviour forwards every command and every availability query
    to the next engine; a stage with no successor is a back-end.
    """

    def __init__(self):
        self.next_engine: BasicEngine | None = None
        self.main_engine: MainEngine | None = None

    @property
    def is_last_engine(self) -> bool:
        return self.next_engine is None

    def is_available(self, cmd: Command) -> bool:
        if self.next_engine is None:
            return True
        return self.next_engine.is_available(cmd)

    def supports_loops(self) -> bool:
        return self.next_engine.supports_loops() if self.next_engine else False

    def receive(self, cmd: Command) -> None:
        self.send(cmd)

    def send(self, cmd: Command) -> None:
        if self.next_engine is not None:
            self.next_engine.receive(cmd)

    def physical_ids(self, ids: Sequence[int]) -> list[int]:
        """Translate logical ids to the ids seen downstream (mappers override)."""
        ids = list(ids)
        return self.next_engine.physical_ids(ids) if self.next_engine else ids


class _Frame:
    """Emission target: active scope engines (outermost first) and a sink."""

    def __init__(self, sink: Callable[[Command], None]):
        self.scopes: list = []
        self.sink = sink
        self.computes: list = []  # closed compute sections awaiting uncompute

    def dispatch(self, cmd: Command, start: int | None = None) -> None:
        pending = [cmd]
        top = len(self.scopes) if start is None else start
        for scope in reversed(self.scopes[:top]):
            nxt = []
            for c in pending:
                nxt.extend(scope.process(c))
            pending = nxt
            if not pending:
                return
        for c in pending:
            self.sink(c)


class MainEngine(BasicEngine):
    """Front end: owns qubit lifetimes, the engine chain and measurement results.

    ``MainEngine()`` builds the default chain (AutoReplacer, LocalOptimizer(5))
    in front of a state-vector simulator.
    """

    def __init__(self, backend: BasicEngine | None = None,
                 engine_list: Sequence[BasicEngine] | None = None):
        super().__init__()
        if backend is None:
            from .backends.simulator import Simulator
            backend = Simulator()
        if engine_list is None:
            from .setups import default_engines
            engine_list = default_engines()
        self.backend = backend
        self.engines = list(engine_list) + [backend]
        seen = set()
        for eng in self.engines:
            if id(eng) in seen:
                raise QForgeError("an engine instance appears twice in the chain")
            seen.add(id(eng))
        for a, b in zip(self.engines, self.engines[1:]):
            a.next_engine = b
        backend.next_engine = None
        for eng in self.engines:
            eng.main_engine = self
        self.main_engine = self
        self.next_engine = self.engines[0]

        self._next_id = 0
        self.live_qubits: set[int] = set()
        self.measurement_results: dict[int, int] = {}
        self._unflushed_measure: set[int] = set()
        self._handles: weakref.WeakValueDictionary[int, Qubit] = weakref.WeakValueDictionary()
        self._frames = [_Frame(self.next_engine.receive)]
        self._deferred: list[BaseException] = []
        self._loop_counter = 0

    # -- qubits ------------------------------------------------------------

    def new_qubit_id(self) -> int:
        qid = self._next_id
        self._next_id += 1
        return qid

    def allocate_qubit(self, dirty: bool = False) -> Qureg:
        """A register of length one holding a fresh qubit in |0>."""
        self._raise_deferred()
        qid = self.new_qubit_id()
        qubit = Qubit(self, qid, dirty=dirty)
        self._handles[qid] = qubit
        self.live_qubits.add(qid)
        tags = (DirtyTag(),) if dirty else ()
        self._dispatch(Command(Allocate, ((qid,),), (), tags))
        return Qureg([qubit])

    def allocate_qureg(self, n: int) -> Qureg:
        if n < 1:
            raise ValueError("allocate_qureg needs n >= 1")
        return Qureg(self.allocate_qubit()[0] for _ in range(n))

    def _deallocate(self, qubit: Qubit) -> None:
        if qubit.id not in self.live_qubits:
            return
        self.live_qubits.discard(qubit.id)
        tags = (DirtyTag(),) if qubit.dirty else ()
        self._dispatch(Command(Deallocate, ((qubit.id,),), (), tags))

    def release(self, qubits) -> None:
        for q in as_qubit_list(qubits):
            q.release()

    def _mark_released(self, qid: int) -> None:
        """A scope replay deallocated ``qid``; keep the handle from doing it again."""
        self.live_qubits.discard(qid)
        handle = self._handles.get(qid)
        if handle is not None:
            handle._released = True

    def qubit_refs(self, ids: Iterable[int]) -> Qureg:
        return Qureg(Qubit(self, i, owned=False) for i in ids)

    # -- commands ----------------------------------------------------------

    def emit(self, cmd: Command) -> None:
        """Entry point for ``gate | qubits``: lifetime check, then dispatch."""
        self._raise_deferred()
        # Inside a decomposition (a capture frame) the qubits come from an
        # already-checked command whose ancillas may be released by now.
        dead = [q for q in cmd.all_ids if q not in self.live_qubits] if len(self._frames) == 1 else ()
        if dead:
            raise LifetimeError(f"{cmd.gate} references unallocated qubit(s) {dead}")
        if isinstance(cmd.gate, MeasureGate):
            self._unflushed_measure.update(cmd.targets)
        self._dispatch(cmd)

    def send_commands(self, cmds: Iterable[Command]) -> None:
        for cmd in cmds:
            self.emit(cmd)

    def receive(self, cmd: Command) -> None:
        self.emit(cmd)

    def _dispatch(self, cmd: Command) -> None:
        self._frames[-1].dispatch(cmd)

    def flush(self) -> None:
        self._raise_deferred()
        self._frames[0].dispatch(_FLUSH_CMD)
        self._unflushed_measure.clear()
        self._raise_deferred()

    # -- frames and scopes (used by meta blocks and decomposition) --------

    @property
    def frame(self) -> _Frame:
        return self._frames[-1]

    def push_frame(self, sink: Callable[[Command], None]) -> _Frame:
        frame = _Frame(sink)
        self._frames.append(frame)
        return frame

    def pop_frame(self, frame: _Frame) -> None:
        if self._frames[-1] is not frame:
            raise QForgeError("frame stack corrupted")
        self._frames.pop()

    def next_loop_id(self) -> int:
        self._loop_counter += 1
        return self._loop_counter

    # -- measurement -------------------------------------------------------

    def set_measurement_result(self, qubit_id: int, value: int) -> None:
        self.measurement_results[qubit_id] = int(bool(value))

    def record_measurement(self, cmd: Command, value: int) -> None:
        """Back-ends call this for a Measure; honours a mapper's logical-id tag."""
        for tag in cmd.tags:
            if isinstance(tag, LogicalQubitTag):
                self.set_measurement_result(tag.logical_id, value)
                return
        self.set_measurement_result(cmd.targets[0], value)

    def get_measurement(self, qubit) -> int:
        qid = qubit if isinstance(qubit, int) else qubit.id
        self._raise_deferred()
        if qid in self._unflushed_measure or qid not in self.measurement_results:
            raise MeasurementError(
                f"no measurement result available for qubit {qid} (measure and flush first)"
            )
        return self.measurement_results[qid]

    # -- errors raised where they cannot propagate ------------------------

    def _defer_error(self, exc: BaseException) -> None:
        self._deferred.append(exc)

    def _raise_deferred(self) -> None:
        if self._deferred:
            exc = self._deferred.pop(0)
            self._deferred.clear()
            raise exc

    def physical_ids(self, ids):
        return self.next_engine.physical_ids(ids)


_FLUSH_CMD = Command(Flush, ())
