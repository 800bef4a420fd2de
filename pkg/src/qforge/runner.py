"""Run configuration and dispatch shared by the CLI and the HTTP service."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .backends import CircuitDrawer, CommandPrinter, ResourceCounter, Simulator
from .engine import MainEngine, Qureg
from .errors import QForgeError
from .passes.mapper import CouplingGraph
from .passes.optimizer import DEFAULT_WINDOW
from .setups import CHAINS, engines_for

EXAMPLES = ("rng", "entangle", "teleport", "grover", "shor")
BACKENDS = ("sim", "printer", "resources", "draw-tikz", "draw-text")


class ConfigError(QForgeError, ValueError):
    """A run configuration failed validation."""


@dataclass
class RunConfig:
    example: str
    backend: str = "sim"
    shots: int = 1
    seed: int | None = None
    qubits: int | None = None  # entangle width / grover search bits
    number: int | None = None  # N to factor
    chain: str = "default"
    graph_file: str | None = None
    opt_window: int = DEFAULT_WINDOW
    emulate: bool = True
    dump_state: str | None = None
    marked: int | None = None  # grover element to find
    feedback: str = "quantum"  # teleport corrections: "quantum" (controlled) or "classical"

    def validate(self) -> "RunConfig":
        if self.example not in EXAMPLES:
            raise ConfigError(f"unknown example {self.example!r}; choose from {', '.join(EXAMPLES)}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; choose from {', '.join(BACKENDS)}")
        if self.chain not in CHAINS:
            raise ConfigError(f"unknown chain {self.chain!r}; choose from {', '.join(CHAINS)}")
        if self.shots < 1:
            raise ConfigError("--shots must be >= 1")
        if self.opt_window < 1:
            raise ConfigError("--opt-window must be >= 1")
        if self.qubits is not None:
            low = 2 if self.example == "grover" else 1
            if self.qubits < low:
                raise ConfigError(f"{self.example} needs --qubits >= {low}")
            if self.qubits > 30:
                raise ConfigError("--qubits above 30 does not fit a state vector in memory")
        if self.number is not None and self.number < 2:
            raise ConfigError("--number must be >= 2")
        if self.graph_file is not None and self.chain != "mapped":
            raise ConfigError("--graph only applies to --chain mapped")
        if self.marked is not None and self.qubits is not None and not 0 <= self.marked < 1 << self.qubits:
            raise ConfigError("--marked must fit in --qubits bits")
        if self.feedback not in ("quantum", "classical"):
            raise ConfigError("--feedback must be quantum or classical")
        if self.dump_state is not None and self.backend != "sim":
            raise ConfigError("--dump-state needs the sim backend")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    example: str
    backend: str
    data: dict[str, Any] | None = None
    text: str | None = None
    info: list[str] = field(default_factory=list)

    def render(self, as_json: bool = False) -> str:
        """Text back-ends print their text (``{"output": text}`` with ``as_json``);
        everything else prints compact JSON."""
        if self.text is not None and not as_json:
            return self.text.rstrip("\n")
        payload = self.data if self.data is not None else {"output": self.text}
        return json.dumps(payload, separators=(",", ":"))


class Session:
    """One engine chain plus back-end built from a :class:`RunConfig`."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        # classical choices (random states, Shor bases) use a stream apart from the simulator's
        self.rng = np.random.default_rng(None if cfg.seed is None else [cfg.seed, 1])
        if cfg.backend == "sim":
            self.backend = Simulator(seed=cfg.seed, emulate=cfg.emulate)
        elif cfg.backend == "printer":
            self.backend = CommandPrinter()
        elif cfg.backend == "resources":
            self.backend = ResourceCounter()
        else:
            self.backend = CircuitDrawer()
        graph = CouplingGraph.from_file(cfg.graph_file) if cfg.graph_file else None
        self.info: list[str] = []
        self.eng = MainEngine(self.backend, engines_for(cfg.chain, cfg.opt_window, graph))

    @property
    def simulating(self) -> bool:
        return isinstance(self.backend, Simulator)

    def sim_ids(self, qureg: Qureg) -> list[int]:
        """Ids of ``qureg`` as the back-end sees them (after any mapping); needs a flush."""
        return list(self.eng.physical_ids(qureg.ids))

    def log(self, message: str) -> None:
        """Diagnostic line for stderr."""
        self.info.append(message)

    def dump(self) -> None:
        """Write the simulator state to ``--dump-state`` if requested (needs a flush)."""
        if self.simulating and self.cfg.dump_state is not None:
            self.eng.flush()
            self.backend.dump_state(self.cfg.dump_state)

    def sample(self, qureg: Qureg) -> dict[int, int] | None:
        """Right before the final measurement: dump the state if asked and, with
        several shots on the simulator, sample the outcome distribution of ``qureg``
        (bit k of an outcome is ``qureg[k]``) instead of rerunning the circuit."""
        self.dump()
        if not self.simulating or self.cfg.shots <= 1:
            return None
        self.eng.flush()
        return self.backend.sample(self.sim_ids(qureg), self.cfg.shots)

    def output(self) -> tuple[dict | None, str | None]:
        """Back-end output for non-simulator runs."""
        b = self.backend
        if isinstance(b, CommandPrinter):
            return None, b.text() + "\n"
        if isinstance(b, ResourceCounter):
            return b.report.to_dict(), str(b.report) + "\n"
        if isinstance(b, CircuitDrawer):
            return None, b.get_latex() if self.cfg.backend == "draw-tikz" else b.get_text()
        return None, None


def bitstring(value: int, width: int) -> str:
    """Qubit 0 first: character k is bit k of ``value``."""
    return "".join("1" if (value >> k) & 1 else "0" for k in range(width))


def run(cfg: RunConfig) -> RunResult:
    cfg.validate()
    from .algorithms import DRIVERS

    session = Session(cfg)
    data = DRIVERS[cfg.example](session)
    if session.simulating:
        return RunResult(cfg.example, cfg.backend, data=data, info=session.info)
    out, text = session.output()
    return RunResult(cfg.example, cfg.backend, data=out, text=text, info=session.info)
