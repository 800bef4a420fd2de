"""Meta-instructions: Control, Compute/Uncompute/CustomUncompute, Dagger, Loop.

Each block is a scope engine pushed onto the emitting frame for the duration
of a ``with`` statement. A scope sees every command emitted inside it (after
any inner scopes have acted) and either rewrites it and passes it on, or
records it to replay at scope exit.
"""
from __future__ import annotations

from .engine import MainEngine, as_qubit_list
from .errors import CommandError, ScopeError
from .gates import (AllocateQubitGate, ClassicalInstruction, Command, ComputeTag,
                    DeallocateQubitGate, FlushGate, LoopTag, MeasureGate, UncomputeTag,
                    has_scope_tag)


def _retag(cmd: Command, tag) -> Command:
    """Replace any Compute/Uncompute tag on ``cmd`` by ``tag``."""
    kept = tuple(t for t in cmd.tags if not isinstance(t, (ComputeTag, UncomputeTag)))
    return cmd.with_tags(kept + ((tag,) if tag is not None else ()))


def _swap_scope_tag(cmd: Command) -> Command:
    if cmd.has_tag(ComputeTag):
        return _retag(cmd, UncomputeTag())
    if cmd.has_tag(UncomputeTag):
        return _retag(cmd, ComputeTag())
    return cmd


def _allocation_balance(record: list[Command]) -> tuple[set[int], set[int]]:
    allocated, deallocated = set(), set()
    for cmd in record:
        if isinstance(cmd.gate, AllocateQubitGate):
            allocated.add(cmd.targets[0])
        elif isinstance(cmd.gate, DeallocateQubitGate):
            deallocated.add(cmd.targets[0])
    return allocated, deallocated


class _Scope:
    def __init__(self, engine: MainEngine):
        self.engine = engine
        self._frame = None

    def __enter__(self):
        self._frame = self.engine.frame
        self._frame.scopes.append(self)
        return self

    def _pop(self) -> None:
        if not self._frame.scopes or self._frame.scopes[-1] is not self:
            raise ScopeError("meta-instruction blocks must be properly nested")
        self._frame.scopes.pop()

    def __exit__(self, exc_type, exc, tb):
        self._pop()
        return False

    def process(self, cmd: Command) -> list[Command]:
        return [cmd]


class Control(_Scope):
    """Condition every command of the block on ``qubits`` all being |1>.

    Compute- and Uncompute-tagged commands pass through uncontrolled: a
    U . action . U^dagger section is controlled by controlling the action only.
    """

    def __init__(self, engine: MainEngine, qubits):
        super().__init__(engine)
        seen = []
        for q in as_qubit_list(qubits):
            if q.id not in seen:
                seen.append(q.id)
        self.ids = tuple(seen)

    def process(self, cmd: Command) -> list[Command]:
        if not self.ids or isinstance(cmd.gate, ClassicalInstruction) or has_scope_tag(cmd.tags):
            return [cmd]
        overlap = set(self.ids) & set(cmd.targets)
        if overlap:
            raise CommandError(f"control qubit(s) {sorted(overlap)} are targets of {cmd.gate}")
        return [cmd.with_controls(self.ids)]


class Compute(_Scope):
    """Tag and record a unitary preamble so it can be undone later."""

    def __init__(self, engine: MainEngine):
        super().__init__(engine)
        self.record: list[Command] = []

    def process(self, cmd: Command) -> list[Command]:
        if isinstance(cmd.gate, MeasureGate):
            raise ScopeError("Measure is not allowed inside a Compute section")
        if isinstance(cmd.gate, FlushGate):
            return [cmd]
        tagged = _retag(cmd, ComputeTag())
        self.record.append(tagged)
        return [tagged]

    def __exit__(self, exc_type, exc, tb):
        self._pop()
        if exc_type is None:
            self._frame.computes.append(self)
        return False

    def live_allocations(self) -> set[int]:
        allocated, deallocated = _allocation_balance(self.record)
        return allocated - deallocated


def uncompute(engine: MainEngine) -> None:
    """Emit the most recent compute section reversed, every gate inverted."""
    frame = engine.frame
    if not frame.computes:
        raise ScopeError("Uncompute without a matching Compute section")
    section = frame.computes.pop()
    allocated, deallocated = _allocation_balance(section.record)
    still_live = allocated - deallocated
    gone = [q for q in still_live if q not in engine.live_qubits]
    if gone:
        raise ScopeError(f"qubit(s) {gone} allocated in Compute were released before Uncompute")
    # Qubits both allocated and released inside the section come back under fresh ids.
    remap = {q: engine.new_qubit_id() for q in sorted(allocated & deallocated)}
    for cmd in reversed(section.record):
        inv = _retag(cmd.inverse(), UncomputeTag()).remap(remap)
        if isinstance(inv.gate, DeallocateQubitGate) and inv.targets[0] in still_live:
            engine._mark_released(inv.targets[0])
        frame.dispatch(inv)


Uncompute = uncompute


class CustomUncompute(_Scope):
    """User-written replacement for the automatic uncompute of the last Compute."""

    def __enter__(self):
        frame = self.engine.frame
        if not frame.computes:
            raise ScopeError("CustomUncompute without a matching Compute section")
        self.section = frame.computes.pop()
        return super().__enter__()

    def process(self, cmd: Command) -> list[Command]:
        if isinstance(cmd.gate, FlushGate):
            return [cmd]
        return [_retag(cmd, UncomputeTag())]

    def __exit__(self, exc_type, exc, tb):
        self._pop()
        if exc_type is None:
            left = [q for q in self.section.live_allocations() if q in self.engine.live_qubits]
            if left:
                raise ScopeError(
                    f"qubit(s) {sorted(left)} allocated in Compute were not released "
                    "by the CustomUncompute block"
                )
        return False


class Dagger(_Scope):
    """Emit the inverse of the block: reversed order, each gate inverted."""

    def __init__(self, engine: MainEngine):
        super().__init__(engine)
        self.record: list[Command] = []

    def process(self, cmd: Command) -> list[Command]:
        if isinstance(cmd.gate, (MeasureGate, FlushGate)):
            raise ScopeError(f"{cmd.gate.name} is not allowed inside a Dagger block")
        self.record.append(cmd)
        return []

    def __exit__(self, exc_type, exc, tb):
        self._pop()
        if exc_type is not None:
            return False
        allocated, deallocated = _allocation_balance(self.record)
        if allocated != deallocated:
            raise ScopeError(
                "qubits allocated inside a Dagger block must be released inside it "
                f"(allocated {sorted(allocated)}, released {sorted(deallocated)})"
            )
        for cmd in reversed(self.record):
            self._frame.dispatch(_swap_scope_tag(cmd.inverse()))
        return False


class Loop(_Scope):
    """Run the block ``iterations`` times.

    If the downstream chain declares loop support the body is sent once with
    a :class:`LoopTag`; otherwise it is unrolled, with fresh ids for qubits
    allocated inside the body on every repetition after the first.
    """

    def __init__(self, engine: MainEngine, iterations: int):
        super().__init__(engine)
        if int(iterations) != iterations or iterations < 1:
            raise ScopeError(f"Loop needs a positive integer iteration count, got {iterations}")
        self.iterations = int(iterations)
        self.record: list[Command] = []

    def process(self, cmd: Command) -> list[Command]:
        if isinstance(cmd.gate, FlushGate):
            raise ScopeError("flush inside a Loop block")
        self.record.append(cmd)
        return []

    def __exit__(self, exc_type, exc, tb):
        self._pop()
        if exc_type is not None:
            return False
        allocated, deallocated = _allocation_balance(self.record)
        if allocated != deallocated:
            raise ScopeError("qubits allocated inside a Loop body must be released inside it")
        frame = self._frame
        if self.iterations == 1:
            for cmd in self.record:
                frame.dispatch(cmd)
        elif self.engine.next_engine.supports_loops():
            tag = LoopTag(self.engine.next_loop_id(), self.iterations)
            for cmd in self.record:
                frame.dispatch(cmd.add_tags(tag))
        else:
            for it in range(self.iterations):
                remap = {} if it == 0 else {q: self.engine.new_qubit_id() for q in sorted(allocated)}
                for cmd in self.record:
                    frame.dispatch(cmd.remap(remap))
        return False


# snake_case spellings
with_control = Control
with_compute = Compute
with_custom_uncompute = CustomUncompute
with_dagger = Dagger
with_loop = Loop
