"""Back-ends: state-vector simulator, resource counter, drawer, printer."""
from .drawer import CircuitDrawer, draw_text, draw_tikz
from .printer import CommandPrinter, print_commands
from .resources import ResourceCounter, ResourceReport, count
from .simulator import Simulator, StateVector

__all__ = ["CircuitDrawer", "CommandPrinter", "ResourceCounter", "ResourceReport", "Simulator",
           "StateVector", "count", "draw_text", "draw_tikz", "print_commands"]
