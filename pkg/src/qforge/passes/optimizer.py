"""Peephole optimizer working on per-qubit lines of buffered commands."""
from __future__ import annotations

from typing import Iterable

from ..engine import BasicEngine
from ..gates import (NO_MERGE, SCOPE_TAGS, AllocateQubitGate, ClassicalInstruction, Command,
                     FlushGate)

DEFAULT_WINDOW = 5


class _Node:
    __slots__ = ("cmd", "seq", "ids")

    def __init__(self, cmd: Command, seq: int):
        self.cmd = cmd
        self.seq = seq
        self.ids = frozenset(cmd.all_ids)


def _same_site(a: Command, b: Command) -> bool:
    return a.qubits == b.qubits and a.controls == b.controls and a.loop_tags == b.loop_tags


def _strip_scope(tags) -> tuple:
    return tuple(t for t in tags if not isinstance(t, SCOPE_TAGS))


class LocalOptimizer(BasicEngine):
    """Cancel inverse pairs and merge neighbouring gates.

    Every qubit has a line of at most ``window`` pending commands. Two commands
    are neighbours when one immediately follows the other on every line they
    touch. Compute/Uncompute tags are ignored when pairing, which is what lets
    a QFT cancel against the inverse QFT of the previous adder. Commands
    carrying different loop tags are never combined.
    """

    def __init__(self, window: int = DEFAULT_WINDOW):
        super().__init__()
        if window < 1:
            raise ValueError("optimizer window must be >= 1")
        self.window = window
        self._lines: dict[int, list[_Node]] = {}
        self._seq = 0

    # -- stream ---------------------------------------------------------------

    def receive(self, cmd: Command) -> None:
        gate = cmd.gate
        if isinstance(gate, FlushGate):
            self._send_all()
            self.send(cmd)
            return
        if isinstance(gate, AllocateQubitGate):
            self.send(cmd)
            return
        if isinstance(gate, ClassicalInstruction):  # Deallocate, Measure
            for q in cmd.all_ids:
                self._drain_line(q)
            self.send(cmd)
            return
        if gate.is_identity(len(cmd.controls)):
            return
        node = _Node(cmd, self._seq)
        self._seq += 1
        for q in node.ids:
            self._lines.setdefault(q, []).append(node)
        self._optimize([node])
        self._enforce_window()

    def pending(self) -> list[Command]:
        nodes = {id(n): n for line in self._lines.values() for n in line}
        return [n.cmd for n in sorted(nodes.values(), key=lambda n: n.seq)]

    # -- optimization ---------------------------------------------------------

    def _predecessor(self, node: _Node) -> _Node | None:
        pred = None
        for q in node.ids:
            line = self._lines[q]
            i = line.index(node)
            if i == 0:
                return None
            p = line[i - 1]
            if pred is None:
                pred = p
            elif p is not pred:
                return None
        if pred is None or pred.ids != node.ids:
            return None
        return pred

    def _remove(self, node: _Node) -> list[_Node]:
        """Drop ``node`` from its lines; return the nodes now following each gap."""
        after = []
        for q in node.ids:
            line = self._lines[q]
            i = line.index(node)
            del line[i]
            if i < len(line):
                after.append(line[i])
            if not line:
                del self._lines[q]
        return after

    def _optimize(self, work: list[_Node]) -> None:
        while work:
            node = work.pop()
            if not any(node in self._lines.get(q, ()) for q in node.ids):
                continue  # removed meanwhile
            pred = self._predecessor(node)
            if pred is None or not _same_site(pred.cmd, node.cmd):
                continue
            a, b = pred.cmd, node.cmd
            if b.gate == a.gate.inverse():
                work.extend(self._remove(node))
                work.extend(self._remove(pred))
                continue
            merged = a.gate.try_merge(b.gate)
            if merged is NO_MERGE:
                continue
            work.extend(self._remove(node))
            if merged.is_identity(len(a.controls)):
                work.extend(self._remove(pred))
            else:
                tags = a.tags if a.tags == b.tags else _strip_scope(a.tags)
                pred.cmd = Command(merged, a.qubits, a.controls, tags)
                work.append(pred)

    # -- forwarding -----------------------------------------------------------

    def _send_node(self, node: _Node) -> None:
        for q in sorted(node.ids):
            line = self._lines.get(q)
            while line and line[0] is not node:
                self._send_node(line[0])
                line = self._lines.get(q)
        self._remove(node)
        self.send(node.cmd)

    def _drain_line(self, q: int) -> None:
        while self._lines.get(q):
            self._send_node(self._lines[q][0])

    def _enforce_window(self) -> None:
        again = True
        while again:
            again = False
            for q in list(self._lines):
                line = self._lines.get(q)
                if line and len(line) > self.window:
                    self._send_node(line[0])
                    again = True

    def _send_all(self) -> None:
        nodes = {id(n): n for line in self._lines.values() for n in line}
        for node in sorted(nodes.values(), key=lambda n: n.seq):
            if any(node in self._lines.get(q, ()) for q in node.ids):
                self._send_node(node)


def local_optimize(cmds: Iterable[Command], window: int = DEFAULT_WINDOW) -> list[Command]:
    """Run the optimizer over a finished command list and return its output."""
    out: list[Command] = []

    class _Sink(BasicEngine):
        def receive(self, cmd):
            out.append(cmd)

    opt = LocalOptimizer(window)
    opt.next_engine = _Sink()
    for cmd in cmds:
        opt.receive(cmd)
    opt._send_all()
    return out
