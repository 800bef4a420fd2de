"""Decomposition rules, the rule registry, AutoReplacer and InstructionFilter."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

from ..engine import BasicEngine, MainEngine, Qureg
from ..errors import DecompositionError, FilterError
from ..gates import (BasicGate, ClassicalInstruction, Command, ComputeTag, UncomputeTag,
                     has_scope_tag)
from ..meta import Control

MAX_DEPTH = 64


class BoundCommand(NamedTuple):
    """What a rule body sees: the gate plus qubit views of the command's registers."""

    gate: BasicGate
    qubits: tuple[Qureg, ...]
    controls: Qureg
    command: Command


def _always(cmd: Command) -> bool:
    return True


@dataclass(frozen=True)
class DecompositionRule:
    """Replace commands whose gate is a ``gate_class`` by the body's emissions.

    Unless ``handles_controls`` is set, the body runs inside
    ``Control(eng, controls)`` so it only has to describe the uncontrolled gate.
    """

    gate_class: type
    decompose: Callable[[MainEngine, BoundCommand], None]
    recognizer: Callable[[Command], bool] = _always
    handles_controls: bool = False
    name: str = ""

    def __str__(self) -> str:
        return self.name or f"{self.gate_class.__name__}:{self.decompose.__name__}"


class RuleSet:
    def __init__(self, rules: Iterable[DecompositionRule] = ()):
        self._rules: dict[type, list[DecompositionRule]] = {}
        for r in rules:
            self.register(r)

    def register(self, rule: DecompositionRule) -> None:
        self._rules.setdefault(rule.gate_class, []).append(rule)

    def rules_for(self, gate: BasicGate) -> list[DecompositionRule]:
        found = []
        for klass in type(gate).__mro__:
            found.extend(self._rules.get(klass, ()))
        return found

    def copy(self) -> "RuleSet":
        out = RuleSet()
        for rules in self._rules.values():
            for r in rules:
                out.register(r)
        return out

    def __iter__(self):
        for rules in self._rules.values():
            yield from rules


def register_decomposition(gate_class: type, decompose, recognizer=_always,
                           handles_controls: bool = False, registry: RuleSet | None = None,
                           name: str = "") -> DecompositionRule:
    rule = DecompositionRule(gate_class, decompose, recognizer, handles_controls, name)
    (registry if registry is not None else default_rules()).register(rule)
    return rule


_DEFAULT: RuleSet | None = None


def default_rules() -> RuleSet:
    """The process-wide registry, populated with the built-in rules on first use."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = RuleSet()
        from .. import arith, rules

        rules.register_builtin_rules(_DEFAULT)
        arith.register_math_rules(_DEFAULT)
    return _DEFAULT


def _inherit_tags(outer: Sequence, cmd: Command) -> Command:
    if not outer:
        return cmd
    tags = list(cmd.tags)
    if has_scope_tag(outer):
        tags = [t for t in tags if not isinstance(t, (ComputeTag, UncomputeTag))]
    merged = tuple(outer) + tuple(t for t in tags if t not in outer)
    return cmd.with_tags(merged)


def expand(engine: MainEngine, rule: DecompositionRule, cmd: Command) -> list[Command]:
    """Run ``rule`` on ``cmd`` and return the emitted commands (nothing is forwarded)."""
    captured: list[Command] = []
    frame = engine.push_frame(captured.append)
    try:
        qubits = tuple(engine.qubit_refs(reg) for reg in cmd.qubits)
        controls = engine.qubit_refs(cmd.controls)
        bound = BoundCommand(cmd.gate, qubits, controls, cmd)
        if rule.handles_controls or not cmd.controls:
            rule.decompose(engine, bound)
        else:
            with Control(engine, controls):
                rule.decompose(engine, bound)
    finally:
        engine.pop_frame(frame)
    return [_inherit_tags(cmd.tags, c) for c in captured]


class AutoReplacer(BasicEngine):
    """Decompose every command the next engine cannot handle.

    Among applicable rules the one with the lowest ``cost`` (default: number
    of emitted commands) wins; outputs are replaced recursively.
    """

    def __init__(self, rules: RuleSet | None = None,
                 cost: Callable[[list[Command]], float] = len, max_depth: int = MAX_DEPTH):
        super().__init__()
        self.rules = rules
        self.cost = cost
        self.max_depth = max_depth

    def receive(self, cmd: Command) -> None:
        self._process(cmd, 0)

    def _process(self, cmd: Command, depth: int) -> None:
        if self.next_engine.is_available(cmd):
            self.send(cmd)
            return
        for out in self.replace(cmd, depth):
            self._process(out, depth + 1)

    def replace(self, cmd: Command, depth: int = 0) -> list[Command]:
        if depth >= self.max_depth:
            raise DecompositionError(
                f"decomposition of {cmd.gate} exceeded depth {self.max_depth}; "
                "the rule set does not terminate in the supported gate set"
            )
        rules = self.rules if self.rules is not None else default_rules()
        candidates = [r for r in rules.rules_for(cmd.gate) if r.recognizer(cmd)]
        if not candidates:
            raise DecompositionError(
                f"no decomposition found for {cmd.gate} with {len(cmd.controls)} control(s)"
            )
        best, best_cost = None, None
        for rule in candidates:
            out = expand(self.main_engine, rule, cmd)
            c = self.cost(out)
            if best_cost is None or c < best_cost:
                best, best_cost = out, c
        return best


def auto_replace(engine: MainEngine, cmd: Command, supported: Callable[[Command], bool],
                 rules: RuleSet | None = None) -> list[Command]:
    """Fully decompose ``cmd`` until every output satisfies ``supported``."""
    replacer = AutoReplacer(rules)
    replacer.main_engine = engine
    out: list[Command] = []

    def walk(c: Command, depth: int) -> None:
        if isinstance(c.gate, ClassicalInstruction) or supported(c):
            out.append(c)
            return
        for sub in replacer.replace(c, depth):
            walk(sub, depth + 1)

    walk(cmd, 0)
    return out


class GateSet:
    """Support predicate built from gate names.

    ``"CNOT"`` means X with one control, ``"Toffoli"`` X with two, ``"C<name>"``
    the named gate with one control and ``"<name>*"`` the gate with any number
    of controls; a bare name means the uncontrolled gate.
    """

    def __init__(self, names: Iterable[str]):
        self.names = frozenset(names)
        self._allowed: dict[str, set | None] = {}
        for name in self.names:
            if name == "CNOT":
                self._add("X", 1)
            elif name == "Toffoli":
                self._add("X", 2)
            elif name.endswith("*"):
                self._allowed[name[:-1]] = None
            elif name.startswith("C") and len(name) > 1 and name[1].isupper():
                self._add(name[1:], 1)
            else:
                self._add(name, 0)

    def _add(self, name: str, n: int) -> None:
        allowed = self._allowed.setdefault(name, set())
        if allowed is not None:
            allowed.add(n)

    def __call__(self, cmd: Command) -> bool:
        if isinstance(cmd.gate, ClassicalInstruction):
            return True
        allowed = self._allowed.get(cmd.gate.name, ())
        return allowed is None or len(cmd.controls) in allowed

    def __repr__(self) -> str:
        return f"GateSet({sorted(self.names)})"


class InstructionFilter(BasicEngine):
    """Defines the gate set seen by the upstream AutoReplacer.

    Answers support queries with its predicate; an unsupported command that
    still arrives (no replacer in front) is a hard error, never dropped.
    """

    def __init__(self, predicate: Callable[[Command], bool]):
        super().__init__()
        self.predicate = predicate

    def is_available(self, cmd: Command) -> bool:
        return isinstance(cmd.gate, ClassicalInstruction) or bool(self.predicate(cmd))

    def receive(self, cmd: Command) -> None:
        if not self.is_available(cmd):
            raise FilterError(f"{cmd.gate} rejected by the instruction filter and no "
                              "upstream AutoReplacer decomposed it")
        self.send(cmd)


def instruction_filter(cmd: Command, predicate: Callable[[Command], bool]) -> str:
    return "pass" if isinstance(cmd.gate, ClassicalInstruction) or predicate(cmd) else "reject"
