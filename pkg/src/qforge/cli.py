"""Command line: ``qforge run <example>`` and ``qforge serve``."""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import QForgeError
from .passes.optimizer import DEFAULT_WINDOW
from .runner import BACKENDS, EXAMPLES, ConfigError, RunConfig, RunResult, run
from .setups import CHAINS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qforge", description="Compile and run quantum programs.")
    parser.add_argument("--version", action="version", version=f"qforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an example program")
    r.add_argument("example", choices=EXAMPLES)
    r.add_argument("--backend", choices=BACKENDS, default="sim")
    r.add_argument("--shots", type=int, default=1)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--qubits", type=int, default=None,
                   help="register width (entangle) or search bits (grover)")
    r.add_argument("--number", type=int, default=None, help="integer to factor (shor)")
    r.add_argument("--marked", type=int, default=None, help="element to find (grover)")
    r.add_argument("--feedback", choices=("quantum", "classical"), default="quantum",
                   help="how teleport applies Bob's corrections")
    r.add_argument("--chain", choices=CHAINS, default="default")
    r.add_argument("--graph", dest="graph_file", default=None,
                   help="coupling graph file for --chain mapped (default: 5-qubit star)")
    r.add_argument("--opt-window", type=int, default=DEFAULT_WINDOW)
    r.add_argument("--no-emulate", dest="emulate", action="store_false",
                   help="decompose math gates instead of emulating them")
    r.add_argument("--dump-state", default=None, metavar="PATH",
                   help="write the state before the final measurement as JSON")
    r.add_argument("--json", action="store_true", help="always print JSON")
    r.add_argument("--server", default=None, metavar="URL",
                   help="send the run to a qforge service instead of running locally")

    s = sub.add_parser("serve", help="serve POST /run and GET /health over HTTP")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return parser


def _config(args) -> RunConfig:
    fields = ("example", "backend", "shots", "seed", "qubits", "number", "chain", "graph_file",
              "opt_window", "emulate", "dump_state", "marked", "feedback")
    return RunConfig(**{f: getattr(args, f) for f in fields})


def _remote(cfg: RunConfig, url: str) -> RunResult:
    import httpx

    if cfg.dump_state is not None:
        raise ConfigError("--dump-state is not available with --server")
    body = cfg.to_dict()
    body.pop("dump_state")
    resp = httpx.post(url.rstrip("/") + "/run", json=body, timeout=None)
    if resp.status_code != 200:
        detail = resp.json().get("detail", resp.text) if resp.headers.get(
            "content-type", "").startswith("application/json") else resp.text
        raise QForgeError(f"server returned {resp.status_code}: {detail}")
    data = resp.json()
    return RunResult(data["example"], data["backend"], data.get("data"), data.get("text"),
                     data.get("info", []))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("qforge.service.app:app", host=args.host, port=args.port)
        return 0

    try:
        cfg = _config(args).validate()
    except ConfigError as exc:
        parser.error(str(exc))  # exits 2
    try:
        result = _remote(cfg, args.server) if args.server else run(cfg)
    except ConfigError as exc:
        print(f"qforge: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # httpx errors, OSError from --graph, QForgeError
        if not isinstance(exc, (QForgeError, OSError, ValueError)) and \
                type(exc).__module__.split(".")[0] != "httpx":
            raise
        print(f"qforge: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for line in result.info:
        print(line, file=sys.stderr)
    print(result.render(args.json))
    return 0


if __name__ == "__main__":
    sys.exit(main())
