"""Resource counter, printer and drawers."""
import json
import math
from collections import Counter

import pytest

from qforge import (CNOT, QFT, All, Entangle, H, Loop, MainEngine, Measure, R, Rx, Rz, Swap,
                    X, Z, Control)
from qforge.backends import (CircuitDrawer, CommandPrinter, ResourceCounter, ResourceReport,
                             count, draw_text, draw_tikz, print_commands)
from qforge.passes import AutoReplacer, InstructionFilter

GHZ3_TEXT = (
    "q0: ─[H]──●──[M]──────\n"
    "          │\n"
    "q1: ──────⊕───●───[M]─\n"
    "              │\n"
    "q2: ──────────⊕───[M]─\n"
)


def ghz3(backend, engines=()):
    eng = MainEngine(backend, list(engines))
    q = eng.allocate_qureg(3)
    H | q[0]
    CNOT | (q[0], q[1])
    CNOT | (q[1], q[2])
    All(Measure) | q
    eng.flush()
    return eng


# -- resource counter ------------------------------------------------------------------


def test_entangle_counts_at_logical_level():
    rc = ResourceCounter()
    eng = MainEngine(rc, [AutoReplacer(), InstructionFilter(lambda c: c.gate != Entangle)])
    q = eng.allocate_qureg(3)
    Entangle | q
    eng.flush()
    rep = rc.report
    assert rep.class_counts == Counter({"H": 1, "X": 2})
    assert rep.count("X", controls=1) == 2
    assert rep.max_width == 3
    assert rep.total == 3


def test_empty_program():
    rc = ResourceCounter()
    eng = MainEngine(rc, [])
    eng.flush()
    assert rc.report.total == 0 and rc.report.max_width == 0
    assert rc.report.to_dict() == {"gates": [], "max_width": 0}
    assert count([]).total == 0


def test_loop_counts_match_unrolled():
    looped = ResourceCounter()
    eng = MainEngine(looped, [])
    q = eng.allocate_qubit()
    with Loop(eng, 8):
        X | q
        Rz(0.25) | q
    eng.flush()
    unrolled = ResourceCounter()
    eng2 = MainEngine(unrolled, [])
    q2 = eng2.allocate_qubit()
    for _ in range(8):
        X | q2
        Rz(0.25) | q2
    eng2.flush()
    assert looped.report.count("X") == 8
    assert looped.gate_counts == unrolled.gate_counts


def test_counter_as_mid_chain_tap_passes_through():
    rc = ResourceCounter()
    rec = CommandPrinter()
    eng = MainEngine(rec, [rc])
    q = eng.allocate_qureg(2)
    H | q[0]
    CNOT | (q[0], q[1])
    eng.flush()
    assert [c.gate.name for c in rec.commands] == ["Allocate", "Allocate", "H", "X", "Flush"]
    assert rc.report.total == 2


def test_width_tracks_deallocation():
    rc = ResourceCounter()
    eng = MainEngine(rc, [])
    a = eng.allocate_qureg(2)
    b = eng.allocate_qubit()
    b.release()
    c = eng.allocate_qureg(2)
    eng.flush()
    assert rc.max_width == 4
    del a, c


def test_report_invariants_and_json_round_trip():
    rc = ResourceCounter()
    eng = MainEngine(rc, [])
    q = eng.allocate_qureg(3)
    Rx(0.5) | q[0]
    Rx(0.5 + 4 * math.pi) | q[0]  # same canonical parameter
    with Control(eng, q[:2]):
        X | q[2]
    Swap | (q[0], q[2])
    eng.flush()
    rep = rc.report
    assert sum(rep.class_counts.values()) == rep.total
    rx = [g for g in rep.to_dict()["gates"] if g["name"] == "Rx"]
    assert len(rx) == 1 and rx[0]["count"] == 2
    data = json.loads(rep.to_json())
    assert set(data) == {"gates", "max_width"}
    for g in data["gates"]:
        assert set(g) == {"name", "params", "controls", "count"}
    back = ResourceReport.from_dict(data)
    assert back.gate_counts == rep.gate_counts and back.max_width == rep.max_width == 3


def test_report_text():
    rc = ResourceCounter()
    eng = MainEngine(rc, [])
    q = eng.allocate_qureg(2)
    H | q[0]
    CNOT | (q[0], q[1])
    eng.flush()
    assert str(rc) == "H : 1\nCX : 1\nmax_width : 2"


def test_counts_depend_on_insertion_point():
    reports = []
    for level in ("default", "two-level"):
        rc = ResourceCounter()
        keep = (lambda c: c.gate != QFT) if level == "default" else (lambda c: True)
        eng = MainEngine(rc, [AutoReplacer(), InstructionFilter(keep)])
        q = eng.allocate_qureg(3)
        QFT | q
        eng.flush()
        reports.append(rc.report)
    assert reports[0].class_counts["QFT"] == 0 and reports[1].class_counts == Counter({"QFT": 1})
    for rep in reports:
        assert sum(rep.class_counts.values()) == rep.total


# -- printer ----------------------------------------------------------------------------


def test_printer_format():
    p = CommandPrinter()
    eng = MainEngine(p, [])
    q = eng.allocate_qureg(2)
    Rx(0.5) | q[0]
    with Control(eng, q[0]):
        R(math.pi / 2) | q[1]
    eng.flush()
    assert p.lines == [
        "Allocate | [0]",
        "Allocate | [1]",
        "Rx(0.5) | [0]",
        "R(1.5707963268) | [1] ; ctrl=[0]",
        "Flush",
    ]
    assert print_commands(p.commands) == p.text()


def test_printer_qft_rule_phase():
    p = CommandPrinter()
    eng = MainEngine(p, [AutoReplacer(), InstructionFilter(lambda c: c.gate != QFT)])
    q = eng.allocate_qureg(2)
    QFT | q
    eng.flush()
    assert any(line.startswith("R(1.5707963268) | ") and "ctrl=" in line for line in p.lines)


def test_printer_echo(capsys):
    import sys

    p = CommandPrinter(stream=sys.stdout)
    eng = MainEngine(p, [])
    q = eng.allocate_qubit()
    Z | q
    eng.flush()
    assert capsys.readouterr().out.splitlines()[1] == "Z | [0]"
    del q


def test_printer_measurement_reads_zero():
    eng = MainEngine(CommandPrinter(), [])
    q = eng.allocate_qubit()
    X | q
    Measure | q
    eng.flush()
    assert int(q) == 0


# -- drawers -----------------------------------------------------------------------------


def test_draw_text_ghz3_golden():
    d = CircuitDrawer()
    ghz3(d)
    assert d.get_text() == GHZ3_TEXT
    d2 = CircuitDrawer()
    ghz3(d2)
    assert d2.get_text().encode() == GHZ3_TEXT.encode()


def test_draw_text_single_gate():
    d = CircuitDrawer()
    eng = MainEngine(d, [])
    q = eng.allocate_qubit()
    H | q
    eng.flush()
    assert d.get_text() == "q0: ─[H]─\n"
    assert draw_text([]) == ""


def test_draw_text_wire_order():
    d = CircuitDrawer(wire_order=[2, 1, 0])
    ghz3(d)
    lines = d.get_text().splitlines()
    assert lines[0].startswith("q2: ") and lines[-1].startswith("q0: ")


def test_draw_tikz_structure():
    d = CircuitDrawer()
    ghz3(d)
    tex = d.get_latex()
    assert tex.startswith("\\documentclass[tikz,border=4pt]{standalone}\n")
    assert tex.rstrip().endswith("\\end{document}")
    assert "\\usepackage" not in tex
    assert tex.count("\\node[anchor=east]") == 3  # one label per wire
    assert tex.count("{H};") == 1
    assert tex.count("circle (0.07)") == 2  # control dots
    assert tex.count("circle (0.16)") == 2  # targets
    assert tex.count("arc (150:30:0.23)") == 3  # meters
    assert "-0.00" not in tex
    d2 = CircuitDrawer()
    ghz3(d2)
    assert d2.get_latex() == tex
    assert draw_tikz(d.commands) == tex


def test_draw_tikz_single_h():
    d = CircuitDrawer()
    eng = MainEngine(d, [])
    q = eng.allocate_qubit()
    H | q
    eng.flush()
    tex = d.get_latex()
    assert tex.count("\\node[gate]") == 1 and "{H};" in tex
    assert tex.count("\\node[anchor=east]") == 1


def test_draw_tikz_escapes_dagger():
    d = CircuitDrawer()
    eng = MainEngine(d, [])
    q = eng.allocate_qubit()
    from qforge import S
    S.inverse() | q
    eng.flush()
    assert "†" not in d.get_latex()


@pytest.mark.parametrize("backend", [CommandPrinter, ResourceCounter, CircuitDrawer])
def test_backends_are_pure(backend):
    outs = []
    for _ in range(2):
        b = backend()
        ghz3(b)
        outs.append(str(b.report) if isinstance(b, ResourceCounter) else
                    b.text() if isinstance(b, CommandPrinter) else b.get_text() + b.get_latex())
    assert outs[0] == outs[1]
