"""Compiler engines: decomposition, gate-set filtering, peephole optimization, mapping."""
from .mapper import CouplingGraph, CouplingMapper, choose_placement, map_to_coupling, star_graph
from .optimizer import LocalOptimizer, local_optimize
from .replacer import (AutoReplacer, BoundCommand, DecompositionRule, GateSet, InstructionFilter,
                       RuleSet, auto_replace, default_rules, expand, instruction_filter,
                       register_decomposition)

__all__ = [
    "AutoReplacer", "BoundCommand", "CouplingGraph", "CouplingMapper", "DecompositionRule",
    "GateSet", "InstructionFilter", "LocalOptimizer", "RuleSet", "auto_replace",
    "choose_placement", "default_rules", "expand", "instruction_filter", "local_optimize",
    "map_to_coupling", "register_decomposition", "star_graph",
]
