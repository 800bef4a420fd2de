"""Command-line front end: output formats, exit codes, determinism."""
import json
import subprocess
import sys

import httpx
import pytest
from fastapi.testclient import TestClient

from qforge.cli import build_parser, main
from qforge.service.app import app


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_entangle_json(capsys):
    code, out, _ = cli(capsys, "run", "entangle", "--backend", "sim", "--shots", "10000",
                       "--seed", "7")
    assert code == 0
    data = json.loads(out)
    assert data["shots"] == 10000 and set(data["counts"]) == {"000", "111"}
    assert out == json.dumps(data, separators=(",", ":")) + "\n"


def test_shor_15(capsys):
    code, out, _ = cli(capsys, "run", "shor", "--number", "15", "--seed", "1")
    assert code == 0 and out == '{"factors":[3,5]}\n'


def test_seed_determinism_bytes():
    args = [sys.executable, "-m", "qforge.cli", "run", "grover", "--qubits", "4", "--shots", "50",
            "--seed", "12"]
    a = subprocess.run(args, capture_output=True, check=True).stdout
    b = subprocess.run(args, capture_output=True, check=True).stdout
    assert a == b and a


@pytest.mark.parametrize("example", ["rng", "entangle", "teleport", "grover", "shor"])
def test_seed_determinism_in_process(capsys, example):
    outs = [cli(capsys, "run", example, "--seed", "3", "--shots", "5")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_tikz_output(capsys):
    code, out, _ = cli(capsys, "run", "entangle", "--backend", "draw-tikz")
    assert code == 0
    assert out.startswith("\\documentclass") and out.rstrip().endswith("\\end{document}")


def test_text_backends_with_json_flag(capsys):
    code, out, _ = cli(capsys, "run", "rng", "--backend", "printer", "--json")
    assert code == 0
    assert json.loads(out)["output"].splitlines()[1] == "H | [0]"


def test_resources_json_schema(capsys):
    code, out, _ = cli(capsys, "run", "entangle", "--backend", "resources", "--json")
    data = json.loads(out)
    assert set(data) == {"gates", "max_width"} and data["max_width"] == 3
    code, out, _ = cli(capsys, "run", "entangle", "--backend", "resources")
    assert "max_width : 3" in out


def test_info_goes_to_stderr(capsys):
    code, out, err = cli(capsys, "run", "shor", "--number", "49")
    assert code == 0 and json.loads(out) == {"factors": [7, 7]}
    assert "perfect power" in err


@pytest.mark.parametrize("argv", [
    ["run", "nope"],
    ["run", "rng", "--backend", "qpu"],
    ["run", "rng", "--shots", "0"],
    ["run", "rng", "--shots", "x"],
    ["run", "grover", "--qubits", "1"],
    ["run", "entangle", "--qubits", "31"],
    ["run", "shor", "--number", "1"],
    ["run", "rng", "--graph", "g.txt"],
    ["run", "rng", "--backend", "printer", "--dump-state", "s.json"],
    ["run", "rng", "--opt-window", "0"],
    [],
])
def test_bad_flags_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_prime_number_exit_2(capsys):
    code, out, err = cli(capsys, "run", "shor", "--number", "13")
    assert code == 2 and out == "" and "prime" in err


def test_mapping_error_exit_1(capsys):
    code, out, err = cli(capsys, "run", "entangle", "--chain", "mapped", "--qubits", "6")
    assert code == 1 and err.startswith("qforge: error: MappingError")


def test_missing_graph_file_exit_1(capsys, tmp_path):
    code, _, err = cli(capsys, "run", "entangle", "--chain", "mapped",
                       "--graph", str(tmp_path / "missing.graph"))
    assert code == 1 and "error" in err


def test_custom_graph_file(capsys, tmp_path):
    g = tmp_path / "line.graph"
    g.write_text("0 1\n1 2\n")
    code, out, _ = cli(capsys, "run", "entangle", "--chain", "mapped", "--graph", str(g),
                       "--shots", "100", "--seed", "1")
    assert code == 0 and set(json.loads(out)["counts"]) == {"000", "111"}


def test_dump_state(capsys, tmp_path):
    path = tmp_path / "psi.json"
    code, _, _ = cli(capsys, "run", "entangle", "--dump-state", str(path))
    data = json.loads(path.read_text())
    assert code == 0 and sorted(r[0] for r in data["amplitudes"]) == ["000", "111"]


def test_no_emulate_matches_emulated(capsys):
    a = cli(capsys, "run", "shor", "--number", "15", "--seed", "2")[1]
    b = cli(capsys, "run", "shor", "--number", "15", "--seed", "2", "--no-emulate")[1]
    assert json.loads(a) == json.loads(b) == {"factors": [3, 5]}


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and capsys.readouterr().out.startswith("qforge ")


def test_parser_defaults():
    args = build_parser().parse_args(["run", "rng"])
    assert args.backend == "sim" and args.shots == 1 and args.chain == "default"


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "qforge.cli", "run", "rng", "--seed", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["bit"] in (0, 1)


# -- --server goes through the HTTP service ------------------------------------------------


@pytest.fixture
def served(monkeypatch):
    client = TestClient(app)

    def post(url, json=None, timeout=None):
        assert url == "http://qforge.test/run"
        return client.post("/run", json=json)

    monkeypatch.setattr(httpx, "post", post)
    return client


def test_server_mode_matches_local(capsys, served):
    local = cli(capsys, "run", "grover", "--qubits", "3", "--shots", "20", "--seed", "4")
    remote = cli(capsys, "run", "grover", "--qubits", "3", "--shots", "20", "--seed", "4",
                 "--server", "http://qforge.test/")
    assert local[0] == remote[0] == 0 and local[1] == remote[1]


def test_server_mode_text_backend(capsys, served):
    code, out, _ = cli(capsys, "run", "entangle", "--backend", "draw-text",
                       "--server", "http://qforge.test")
    assert code == 0 and out.startswith("q0: ")


def test_server_mode_errors(capsys, served):
    code, _, err = cli(capsys, "run", "shor", "--number", "13", "--server", "http://qforge.test")
    assert code == 1 and "422" in err
    code, _, err = cli(capsys, "run", "rng", "--dump-state", "x.json", "--server",
                       "http://qforge.test")
    assert code == 2


def test_server_unreachable(capsys):
    code, _, err = cli(capsys, "run", "rng", "--server", "http://127.0.0.1:9")
    assert code == 1 and err.startswith("qforge: error: ConnectError")
