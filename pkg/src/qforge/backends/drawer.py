"""Circuit drawings: a standalone TikZ document and a plain-text rendering."""
from __future__ import annotations

from typing import Iterable, Sequence

from ..engine import BasicEngine
from ..gates import (AllocateQubitGate, Command, DeallocateQubitGate, FlushGate, MeasureGate, X)


def _drawable(cmds: Iterable[Command]) -> list[Command]:
    return [c for c in cmds
            if not isinstance(c.gate, (AllocateQubitGate, DeallocateQubitGate, FlushGate))]


def _wires(cmds: Sequence[Command], wire_order: Sequence[int] | None) -> list[int]:
    seen = []
    for c in cmds:
        for q in c.all_ids:
            if q not in seen:
                seen.append(q)
    if wire_order is None:
        return sorted(seen)
    order = list(wire_order)
    return order + sorted(q for q in seen if q not in order)


def _layout(cmds: Sequence[Command], rows: dict[int, int]) -> list[list[Command]]:
    """Greedy columns: a gate occupies every row between its outermost qubits."""
    columns: list[list[Command]] = []
    level = [0] * len(rows)
    for cmd in cmds:
        span = [rows[q] for q in cmd.all_ids]
        lo, hi = min(span), max(span)
        col = max(level[lo:hi + 1])
        if col == len(columns):
            columns.append([])
        columns[col].append(cmd)
        for r in range(lo, hi + 1):
            level[r] = col + 1
    return columns


def _is_cnot_like(cmd: Command) -> bool:
    return cmd.gate == X and bool(cmd.controls)


# -- text ----------------------------------------------------------------------------


def _text_label(cmd: Command) -> str:
    if isinstance(cmd.gate, MeasureGate):
        return "[M]"
    if _is_cnot_like(cmd):
        return "⊕"
    if cmd.gate.name == "Swap":
        return "×"
    return f"[{cmd.gate}]"


def draw_text(cmds: Iterable[Command], wire_order: Sequence[int] | None = None) -> str:
    """Fixed-width rendering, one line per wire: ``q0: ─[H]──●─``."""
    cmds = _drawable(cmds)
    wires = _wires(cmds, wire_order)
    if not wires:
        return ""
    rows = {q: i for i, q in enumerate(wires)}
    prefixes = [f"q{q}: " for q in wires]
    pad = max(len(p) for p in prefixes)
    lines = [p.ljust(pad) for p in prefixes]
    gaps = [" " * pad for _ in wires[:-1]]  # spacer line below each wire but the last
    for column in _layout(cmds, rows):
        cells: dict[int, str] = {}
        through: set[int] = set()  # rows crossed by a vertical connector
        links: set[int] = set()    # gaps crossed by a vertical connector
        for cmd in column:
            for q in cmd.targets:
                cells[rows[q]] = _text_label(cmd)
            for q in cmd.controls:
                cells[rows[q]] = "●"
            span = [rows[q] for q in cmd.all_ids]
            lo, hi = min(span), max(span)
            for r in range(lo, hi):
                links.add(r)
            for r in range(lo + 1, hi):
                if r not in cells:
                    through.add(r)
        width = max([len(c) for c in cells.values()] + [1])
        for r in range(len(wires)):
            if r in cells:
                body = cells[r].center(width, "─")
            elif r in through:
                body = "┼".center(width, "─")
            else:
                body = "─" * width
            lines[r] += "─" + body + "─"
            if r < len(gaps):
                mark = "│" if r in links else " "
                gaps[r] += " " + mark.center(width) + " "
    out = []
    for r, line in enumerate(lines):
        out.append(line)
        if r < len(gaps) and gaps[r].strip():
            out.append(gaps[r].rstrip())
    return "\n".join(out) + "\n"


# -- TikZ ------------------------------------------------------------------------------

_TEX_ESCAPES = {"†": r"$^\dagger$", "_": r"\_", "&": r"\&", "%": r"\%", "#": r"\#"}


def _tex(text: str) -> str:
    return "".join(_TEX_ESCAPES.get(ch, ch) for ch in text)


def _col_width(column: list[Command]) -> float:
    longest = max((len(str(c.gate)) for c in column
                   if not _is_cnot_like(c) and not isinstance(c.gate, MeasureGate)), default=1)
    return max(1.0, 0.16 * longest + 0.5)


def draw_tikz(cmds: Iterable[Command], wire_order: Sequence[int] | None = None) -> str:
    """Standalone LaTeX document (TikZ only) drawing the command stream."""
    cmds = _drawable(cmds)
    wires = _wires(cmds, wire_order)
    rows = {q: i for i, q in enumerate(wires)}
    columns = _layout(cmds, rows)
    xs, x = [], 0.8
    for column in columns:
        w = _col_width(column)
        xs.append(x + w / 2)
        x += w
    end = x + 0.4

    def y(q):
        return -0.8 * rows[q] + 0.0  # no "-0.00" on the top wire

    body = []
    for q in wires:
        body.append(rf"\draw ({0:.2f},{y(q):.2f}) -- ({end:.2f},{y(q):.2f});")
        body.append(rf"\node[anchor=east] at ({0:.2f},{y(q):.2f}) {{$q_{{{q}}}$}};")
    for cx, column in zip(xs, columns):
        for cmd in column:
            ys = [y(q) for q in cmd.all_ids]
            if len(ys) > 1:
                body.append(rf"\draw ({cx:.2f},{min(ys):.2f}) -- ({cx:.2f},{max(ys):.2f});")
            for c in cmd.controls:
                body.append(rf"\fill ({cx:.2f},{y(c):.2f}) circle (0.07);")
            for t in cmd.targets:
                ty = y(t)
                if _is_cnot_like(cmd):
                    body.append(rf"\draw ({cx:.2f},{ty:.2f}) circle (0.16);")
                    body.append(rf"\draw ({cx - 0.16:.2f},{ty:.2f}) -- ({cx + 0.16:.2f},{ty:.2f});")
                    body.append(rf"\draw ({cx:.2f},{ty - 0.16:.2f}) -- ({cx:.2f},{ty + 0.16:.2f});")
                elif isinstance(cmd.gate, MeasureGate):
                    body.append(rf"\node[gate] at ({cx:.2f},{ty:.2f}) {{}};")
                    body.append(rf"\draw ({cx - 0.2:.2f},{ty - 0.1:.2f}) arc (150:30:0.23);")
                    body.append(rf"\draw[->] ({cx:.2f},{ty - 0.12:.2f}) -- ({cx + 0.15:.2f},{ty + 0.17:.2f});")
                else:
                    body.append(rf"\node[gate] at ({cx:.2f},{ty:.2f}) {{{_tex(str(cmd.gate))}}};")
    lines = [
        r"\documentclass[tikz,border=4pt]{standalone}",
        r"\begin{document}",
        r"\begin{tikzpicture}[gate/.style={draw,fill=white,minimum width=0.6cm,"
        r"minimum height=0.6cm,inner sep=2pt,font=\small}]",
        *body,
        r"\end{tikzpicture}",
        r"\end{document}",
    ]
    return "\n".join(lines) + "\n"


class CircuitDrawer(BasicEngine):
    """Collects the whole stream (drawing needs global layout); measurements read 0
    when used as the back-end."""

    def __init__(self, wire_order: Sequence[int] | None = None):
        super().__init__()
        self.commands: list[Command] = []
        self.wire_order = wire_order

    def receive(self, cmd: Command) -> None:
        self.commands.append(cmd)
        if isinstance(cmd.gate, MeasureGate) and self.is_last_engine and self.main_engine:
            self.main_engine.record_measurement(cmd, 0)
        self.send(cmd)

    def get_latex(self) -> str:
        return draw_tikz(self.commands, self.wire_order)

    def get_text(self) -> str:
        return draw_text(self.commands, self.wire_order)
