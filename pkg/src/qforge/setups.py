"""Ready-made engine chains."""
from __future__ import annotations

from .gates import BasicMathGate, ClassicalInstruction, Command, X
from .passes.mapper import CouplingGraph, CouplingMapper, star_graph
from .passes.optimizer import DEFAULT_WINDOW, LocalOptimizer
from .passes.replacer import AutoReplacer, InstructionFilter

CHAINS = ("default", "two-level", "mapped")


def default_engines(window: int = DEFAULT_WINDOW) -> list:
    return [AutoReplacer(), LocalOptimizer(window)]


def qft_level(cmd: Command) -> bool:
    """Everything except math gates: QFTs and phase gates survive to this level."""
    return not isinstance(cmd.gate, BasicMathGate)


def one_qubit_and_cnot(cmd: Command) -> bool:
    if isinstance(cmd.gate, ClassicalInstruction):
        return True
    if cmd.gate == X and len(cmd.controls) == 1 and len(cmd.targets) == 1:
        return True
    m = cmd.gate.matrix
    return m is not None and m.shape == (2, 2) and not cmd.controls and len(cmd.targets) == 1


def two_level_engines(window: int = DEFAULT_WINDOW, tap=None) -> list:
    """Decompose to a QFT-level gate set, optimize there, then lower and optimize again.

    ``tap`` (e.g. a ResourceCounter) is inserted right after the first optimizer.
    """
    engines = [AutoReplacer(), InstructionFilter(qft_level), LocalOptimizer(window)]
    if tap is not None:
        engines.append(tap)
    engines += [AutoReplacer(), LocalOptimizer(window)]
    return engines


def mapped_engines(graph: CouplingGraph | None = None, window: int = DEFAULT_WINDOW,
                   tap=None) -> list:
    """Lower to single-qubit gates and CNOTs, then place on ``graph`` (default: star).

    ``tap`` is inserted right after the mapper.
    """
    engines = [AutoReplacer(), InstructionFilter(one_qubit_and_cnot), LocalOptimizer(window),
               CouplingMapper(graph if graph is not None else star_graph())]
    if tap is not None:
        engines.append(tap)
    engines.append(LocalOptimizer(window))
    return engines


def engines_for(chain: str, window: int = DEFAULT_WINDOW, graph: CouplingGraph | None = None,
                tap=None) -> list:
    if chain == "default":
        engines = default_engines(window)
        if tap is not None:
            engines.append(tap)
        return engines
    if chain == "two-level":
        return two_level_engines(window, tap)
    if chain == "mapped":
        return mapped_engines(graph, window, tap)
    raise ValueError(f"unknown chain {chain!r}; choose from {', '.join(CHAINS)}")
