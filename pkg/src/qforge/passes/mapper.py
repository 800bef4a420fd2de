"""Placement of logical qubits on a device coupling graph, flipping CNOTs as needed."""
from __future__ import annotations

import itertools
from collections import Counter
from importlib import resources
from pathlib import Path
from typing import Iterable

from ..engine import BasicEngine
from ..errors import MappingError
from ..gates import (ClassicalInstruction, Command, DeallocateQubitGate,
                     FlushGate, H, LogicalQubitTag, MeasureGate, X)

#: above this many candidate placements the search falls back to a greedy choice
MAX_EXHAUSTIVE = 200_000
MAX_EXHAUSTIVE_QUBITS = 8


class CouplingGraph:
    """Directed graph of allowed (control, target) CNOT pairs."""

    def __init__(self, nodes: Iterable[int], edges: Iterable[tuple[int, int]]):
        self.edges = frozenset((int(u), int(v)) for u, v in edges)
        for u, v in self.edges:
            if u == v:
                raise MappingError(f"self-loop {u} -> {u} in coupling graph")
        self.nodes = tuple(sorted(set(int(n) for n in nodes) | {x for e in self.edges for x in e}))

    @classmethod
    def parse(cls, text: str) -> "CouplingGraph":
        edges, nodes = [], set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 1:
                nodes.add(int(parts[0]))  # isolated node
                continue
            if len(parts) != 2:
                raise MappingError(f"line {lineno}: expected 'u v', got {raw!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise MappingError(f"line {lineno}: node ids must be integers") from None
        return cls(nodes, edges)

    @classmethod
    def from_file(cls, path: str | Path) -> "CouplingGraph":
        return cls.parse(Path(path).read_text())

    @classmethod
    def builtin(cls, name: str = "ibmqx-star") -> "CouplingGraph":
        return cls.parse(resources.files("qforge.devices").joinpath(f"{name}.graph").read_text())

    def allows(self, control: int, target: int) -> bool:
        return (control, target) in self.edges

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"CouplingGraph(nodes={list(self.nodes)}, edges={sorted(self.edges)})"


def star_graph() -> CouplingGraph:
    return CouplingGraph.builtin("ibmqx-star")


def _is_cnot(cmd: Command) -> bool:
    return cmd.gate == X and len(cmd.controls) == 1 and len(cmd.targets) == 1


def _check_mappable(cmd: Command) -> None:
    if isinstance(cmd.gate, ClassicalInstruction) or _is_cnot(cmd):
        return
    if len(cmd.all_ids) != 1:
        raise MappingError(
            f"mapper accepts single-qubit gates and CNOTs only, got {cmd} "
            "(put an InstructionFilter and AutoReplacer in front of it)"
        )


def _placement_cost(pairs: Counter, place: dict[int, int], graph: CouplingGraph) -> tuple[int, int]:
    bad = flips = 0
    for (c, t), n in pairs.items():
        pc, pt = place[c], place[t]
        if graph.allows(pc, pt):
            continue
        if graph.allows(pt, pc):
            flips += n
        else:
            bad += n
    return bad, flips


def choose_placement(logical: list[int], pairs: Counter, graph: CouplingGraph,
                     fixed: dict[int, int] | None = None) -> dict[int, int]:
    """Assign the unplaced ``logical`` ids to free nodes, fewest unsatisfiable CNOTs first."""
    fixed = dict(fixed or {})
    todo = [q for q in logical if q not in fixed]
    free = [n for n in graph.nodes if n not in fixed.values()]
    if len(todo) > len(free):
        raise MappingError(
            f"circuit needs {len(todo) + len(fixed)} qubits but the device has {len(graph)}"
        )
    relevant = Counter({k: v for k, v in pairs.items() if k[0] in fixed or k[0] in todo})
    n_perm = 1
    for i in range(len(todo)):
        n_perm *= len(free) - i
    if len(todo) <= MAX_EXHAUSTIVE_QUBITS and n_perm <= MAX_EXHAUSTIVE:
        best, best_cost = None, None
        for combo in itertools.permutations(free, len(todo)):
            place = dict(fixed)
            place.update(zip(todo, combo))
            cost = _placement_cost(relevant, place, graph)
            if best_cost is None or cost < best_cost:
                best, best_cost = place, cost
                if cost == (0, 0):
                    break
        return best if best is not None else fixed
    # greedy: most-connected logical qubit first, each to the node that costs least so far
    place = dict(fixed)
    degree = Counter()
    for (c, t), n in pairs.items():
        degree[c] += n
        degree[t] += n
    for q in sorted(todo, key=lambda q: (-degree[q], q)):
        options = [n for n in graph.nodes if n not in place.values()]

        def local(node, q=q):
            trial = dict(place)
            trial[q] = node
            sub = Counter({k: v for k, v in pairs.items() if k[0] in trial and k[1] in trial})
            return _placement_cost(sub, trial, graph)

        place[q] = min(options, key=lambda n: (local(n), n))
    return place


def _rewrite(cmds: list[Command], place: dict[int, int], graph: CouplingGraph) -> list[Command]:
    out = []
    for cmd in cmds:
        phys = cmd.remap(place)
        if isinstance(cmd.gate, MeasureGate):
            phys = phys.add_tags(LogicalQubitTag(cmd.targets[0]))
        if not _is_cnot(cmd):
            out.append(phys)
            continue
        c, t = phys.controls[0], phys.targets[0]
        if graph.allows(c, t):
            out.append(phys)
        elif graph.allows(t, c):
            tags = phys.tags
            hs = [Command(H, ((c,),), (), tags), Command(H, ((t,),), (), tags)]
            out.extend(hs)
            out.append(Command(X, ((c,),), (t,), tags))
            out.extend(hs)
        else:
            raise MappingError(
                f"CNOT between physical qubits {c} and {t} which are not coupled "
                "(swap insertion is not supported)"
            )
    return out


def map_to_coupling(cmds: Iterable[Command], graph: CouplingGraph,
                    fixed: dict[int, int] | None = None) -> tuple[list[Command], dict[int, int]]:
    """Place and rewrite a command list; returns (physical commands, placement)."""
    cmds = list(cmds)
    for cmd in cmds:
        _check_mappable(cmd)
    logical = []
    for cmd in cmds:
        for q in cmd.all_ids:
            if q not in logical:
                logical.append(q)
    pairs = Counter((cmd.controls[0], cmd.targets[0]) for cmd in cmds if _is_cnot(cmd))
    place = choose_placement(logical, pairs, graph, fixed)
    return _rewrite(cmds, place, graph), place


class CouplingMapper(BasicEngine):
    """Buffer until Flush, choose a placement, then emit physical commands.

    Placements of live qubits persist across flushes. CNOTs whose direction
    is not an edge but whose reverse is are flipped with four Hadamards; a
    CNOT between uncoupled qubits is an error.
    """

    def __init__(self, graph: CouplingGraph | None = None):
        super().__init__()
        self.graph = graph if graph is not None else star_graph()
        self.placement: dict[int, int] = {}
        self._buffer: list[Command] = []

    def receive(self, cmd: Command) -> None:
        if isinstance(cmd.gate, FlushGate):
            self._run()
            self.send(cmd)
            return
        _check_mappable(cmd)
        self._buffer.append(cmd)

    def _run(self) -> None:
        if not self._buffer:
            return
        cmds, self._buffer = self._buffer, []
        out, place = map_to_coupling(cmds, self.graph, self.placement)
        self.placement = place
        for cmd in out:
            self.send(cmd)
        for cmd in cmds:
            if isinstance(cmd.gate, DeallocateQubitGate):
                self.placement.pop(cmd.targets[0], None)

    def physical_ids(self, ids):
        missing = [q for q in ids if q not in self.placement]
        if missing:
            raise MappingError(f"qubit(s) {missing} have no placement yet (flush first)")
        return super().physical_ids([self.placement[q] for q in ids])
