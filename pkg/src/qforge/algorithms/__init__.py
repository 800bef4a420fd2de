"""Example programs, each runnable on any back-end.

Every driver takes a :class:`~qforge.runner.Session` and returns a JSON-ready
dict (ignored for non-simulator back-ends, whose own output is reported).
"""
from .entangle import run_entangle
from .grover import grover_iterations, grover_search, marked_default, run_grover, success_probability
from .rng import random_bit, run_rng
from .shor import ShorError, classical_factor, order_from_phase, run_shor, shor_factor
from .teleport import run_teleport, teleport

DRIVERS = {
    "rng": run_rng,
    "entangle": run_entangle,
    "teleport": run_teleport,
    "grover": run_grover,
    "shor": run_shor,
}

__all__ = [
    "DRIVERS", "ShorError", "classical_factor", "grover_iterations", "grover_search",
    "marked_default", "order_from_phase", "random_bit", "run_entangle", "run_grover", "run_rng",
    "run_shor", "run_teleport", "shor_factor", "success_probability", "teleport",
]
