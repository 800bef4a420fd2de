"""``uvicorn qforge.service.app:app`` serves POST /run and GET /health."""
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import QForgeError
from ..runner import ConfigError, RunConfig, run
from .schemas import Health, RunRequest, RunResponse

app = FastAPI(title="qforge", version=__version__)


@app.get("/health", response_model=Health)
def health():
    return Health(status="ok", version=__version__)


@app.post("/run", response_model=RunResponse)
def run_example(req: RunRequest):
    # runs are CPU-bound; FastAPI executes sync handlers in its thread pool
    try:
        result = run(RunConfig(**req.model_dump()))
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except (QForgeError, OSError) as exc:
        raise HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}")
    return RunResponse(example=result.example, backend=result.backend, data=result.data,
                       text=result.text, info=result.info)
