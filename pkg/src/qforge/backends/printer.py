"""Command printer: one stable text line per command."""
from __future__ import annotations

import sys
from typing import Iterable, TextIO

from ..engine import BasicEngine
from ..gates import Command, MeasureGate


def format_command(cmd: Command) -> str:
    return str(cmd)


def print_commands(cmds: Iterable[Command]) -> str:
    return "\n".join(format_command(c) for c in cmds)


class CommandPrinter(BasicEngine):
    """Records (and optionally echoes) every command; forwards when mid-chain.

    As a back-end, measurements read 0.
    """

    def __init__(self, stream: TextIO | None = None, accept_all: bool = True):
        super().__init__()
        self.lines: list[str] = []
        self.commands: list[Command] = []
        self.stream = stream
        self.accept_all = accept_all

    def is_available(self, cmd: Command) -> bool:
        if self.next_engine is not None:
            return self.next_engine.is_available(cmd)
        return self.accept_all

    def receive(self, cmd: Command) -> None:
        line = format_command(cmd)
        self.lines.append(line)
        self.commands.append(cmd)
        if self.stream is not None:
            print(line, file=self.stream)
        if isinstance(cmd.gate, MeasureGate) and self.is_last_engine and self.main_engine:
            self.main_engine.record_measurement(cmd, 0)
        self.send(cmd)

    def text(self) -> str:
        return "\n".join(self.lines)


def echo_printer() -> CommandPrinter:
    return CommandPrinter(sys.stdout)
