"""Resource counting back-end (also usable as a tap in the middle of a chain)."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..engine import BasicEngine
from ..gates import (AllocateQubitGate, Command, DeallocateQubitGate, FlushGate, MeasureGate,
                     format_param)

GateKey = tuple[str, str, int]  # (name, canonical params, number of controls)


def gate_key(cmd: Command) -> GateKey:
    params = ",".join(format_param(p) for p in cmd.gate.params)
    return cmd.gate.name, params, len(cmd.controls)


def multiplicity(cmd: Command) -> int:
    m = 1
    for tag in cmd.loop_tags:
        m *= tag.iterations
    return m


@dataclass
class ResourceReport:
    gate_counts: Counter = field(default_factory=Counter)
    max_width: int = 0
    depth: int = 0

    @property
    def class_counts(self) -> Counter:
        out = Counter()
        for (name, _, _), n in self.gate_counts.items():
            out[name] += n
        return out

    @property
    def total(self) -> int:
        return sum(self.gate_counts.values())

    def count(self, name: str, controls: int | None = None, params: str | None = None) -> int:
        return sum(n for (g, p, c), n in self.gate_counts.items()
                   if g == name and (controls is None or c == controls)
                   and (params is None or p == params))

    def to_dict(self) -> dict:
        gates = [{"name": g, "params": p, "controls": c, "count": n}
                 for (g, p, c), n in sorted(self.gate_counts.items())]
        return {"gates": gates, "max_width": self.max_width}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ResourceReport":
        counts = Counter({(g["name"], g["params"], g["controls"]): g["count"]
                          for g in data.get("gates", [])})
        return cls(counts, data.get("max_width", 0))

    def __str__(self) -> str:
        lines = []
        for (g, p, c), n in sorted(self.gate_counts.items()):
            label = "C" * c + g if c <= 2 else f"C^{c}{g}"
            lines.append(f"{label}{'(' + p + ')' if p else ''} : {n}")
        lines.append(f"max_width : {self.max_width}")
        return "\n".join(lines)


class ResourceCounter(BasicEngine):
    """Counts gates by (name, parameters, control count) and tracks circuit width.

    Loop-tagged commands arriving once count ``iterations`` times. As a
    back-end, measurements read 0.
    """

    def __init__(self):
        super().__init__()
        self.report = ResourceReport()
        self._width = 0
        self._depth: dict[int, int] = {}

    def supports_loops(self) -> bool:
        return True if self.next_engine is None else self.next_engine.supports_loops()

    def receive(self, cmd: Command) -> None:
        gate = cmd.gate
        if isinstance(gate, AllocateQubitGate):
            self._width += 1
            self.report.max_width = max(self.report.max_width, self._width)
        elif isinstance(gate, DeallocateQubitGate):
            self._width -= 1
            self._depth.pop(cmd.targets[0], None)
        elif not isinstance(gate, FlushGate):
            m = multiplicity(cmd)
            self.report.gate_counts[gate_key(cmd)] += m
            d = max((self._depth.get(q, 0) for q in cmd.all_ids), default=0) + m
            for q in cmd.all_ids:
                self._depth[q] = d
            self.report.depth = max(self.report.depth, d)
            if isinstance(gate, MeasureGate) and self.is_last_engine and self.main_engine:
                self.main_engine.record_measurement(cmd, 0)
        self.send(cmd)

    # conveniences mirroring the report
    @property
    def gate_counts(self) -> Counter:
        return self.report.gate_counts

    @property
    def max_width(self) -> int:
        return self.report.max_width

    def __str__(self) -> str:
        return str(self.report)


def count(cmds: Iterable[Command]) -> ResourceReport:
    counter = ResourceCounter()
    for cmd in cmds:
        counter.receive(cmd)
    return counter.report
