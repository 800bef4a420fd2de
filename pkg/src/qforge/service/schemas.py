from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from ..passes.optimizer import DEFAULT_WINDOW


class RunRequest(BaseModel):
    example: Literal["rng", "entangle", "teleport", "grover", "shor"]
    backend: Literal["sim", "printer", "resources", "draw-tikz", "draw-text"] = "sim"
    shots: int = Field(1, ge=1)
    seed: Optional[int] = None
    qubits: Optional[int] = Field(None, ge=1)
    number: Optional[int] = Field(None, ge=2)
    chain: Literal["default", "two-level", "mapped"] = "default"
    graph_file: Optional[str] = None  # path on the server
    opt_window: int = Field(DEFAULT_WINDOW, ge=1)
    emulate: bool = True
    marked: Optional[int] = Field(None, ge=0)
    feedback: Literal["quantum", "classical"] = "quantum"


class RunResponse(BaseModel):
    example: str
    backend: str
    data: Optional[dict[str, Any]] = None
    text: Optional[str] = None
    info: list[str] = []


class Health(BaseModel):
    status: str
    version: str
