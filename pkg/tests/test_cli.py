"""CLI tests: argument handling, run artifacts, and both server transports."""

import socket
import subprocess
import sys
import time

import pytest

from membench.cli import main
from membench.params import default_config, dump_config


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- params ------------------------------------------------------------------------


def test_params_dump_matches_library(capsys):
    code, out, _ = run_cli(["params", "dump"], capsys)
    assert code == 0
    assert out == dump_config(default_config())


def test_params_dump_honours_config_file(tmp_path, capsys):
    conf = tmp_path / "t.conf"
    conf.write_text("device.read_noise_sigma = 0.0\n")
    code, out, _ = run_cli(["params", "dump", "--config", str(conf)], capsys)
    assert code == 0
    assert "device.read_noise_sigma = 0.0" in out


def test_missing_config_file_is_io_error(capsys):
    code, _, err = run_cli(["params", "dump", "--config", "/no/such.conf"], capsys)
    assert code == 1
    assert "io error" in err


# -- run ---------------------------------------------------------------------------


def test_run_is_reproducible(tmp_path, capsys):
    argv = [
        "run",
        "progressive_reset",
        "--seed",
        "9",
        "--out",
        str(tmp_path),
        "n_pulses=200",
        "device.read_noise_sigma=0",
    ]
    code1, out1, _ = run_cli(argv, capsys)
    code2, out2, _ = run_cli(argv, capsys)
    assert code1 == code2 == 0
    dir1, dir2 = out1.strip(), out2.strip()
    assert dir1 != dir2
    csv1 = (tmp_path / "progressive_reset").glob("*/results.csv")
    texts = sorted(p.read_bytes() for p in csv1)
    assert len(texts) == 2
    assert texts[0] == texts[1]


def test_run_dotted_overrides_reach_the_config(tmp_path, capsys):
    argv = [
        "run",
        "progressive_reset",
        "--out",
        str(tmp_path),
        "n_pulses=50",
        "device.read_noise_sigma=0",
        "device.sigma_c2c=0",
    ]
    code, out, _ = run_cli(argv, capsys)
    assert code == 0
    snapshot = (tmp_path / "progressive_reset").glob("*/config.snapshot")
    text = next(iter(snapshot)).read_text()
    assert "device.read_noise_sigma = 0" in text
    assert "device.sigma_c2c = 0" in text
    assert "# knob n_pulses = 50" in text


def test_run_unknown_experiment_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "nosuch"])
    assert exc.value.code == 2  # argparse rejects unknown choices


def test_run_bad_override_exits_1(tmp_path, capsys):
    code, _, err = run_cli(
        ["run", "progressive_reset", "--out", str(tmp_path), "notakeyvalue"], capsys
    )
    assert code == 1
    assert "key=value" in err

    code, _, err = run_cli(
        ["run", "progressive_reset", "--out", str(tmp_path), "bogus_knob=1"], capsys
    )
    assert code == 1
    assert "unknown knob" in err

    code, _, err = run_cli(
        ["run", "progressive_reset", "--out", str(tmp_path), "device.bogus=1"], capsys
    )
    assert code == 1
    assert "unknown config key" in err


# -- serve -------------------------------------------------------------------------


def test_serve_stdio_round_trip():
    script = "PING\nFORM 0 0\nWRITE 0 0 1\nREADBIT 0 0\n"
    proc = subprocess.run(
        [sys.executable, "-m", "membench", "serve", "--stdio", "--seed", "1"],
        input=script,
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert lines[0] == "MEMBENCH READY"
    assert lines[1] == "OK pong"
    assert lines[2] == "OK"
    assert lines[3] == "OK"
    assert lines[4] == "OK 1"


def test_serve_stdio_survives_binary_garbage():
    garbage = b"PING\n\xff\xfe\x00garbage\nPING\n"
    proc = subprocess.run(
        [sys.executable, "-m", "membench", "serve", "--stdio"],
        input=garbage,
        capture_output=True,
        timeout=60,
    )
    assert proc.returncode == 0
    lines = proc.stdout.decode().splitlines()
    assert lines[1] == "OK pong"
    assert lines[2].startswith("ERR PARSE")
    assert lines[3] == "OK pong"


def test_serve_tcp_loopback():
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "membench",
            "serve",
            "--port",
            "0",
            "--seed",
            "2",
            "--max-connections",
            "1",
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        banner = proc.stdout.readline().strip()
        assert banner.startswith("MEMBENCH LISTENING ")
        port = int(banner.split()[-1])
        with socket.create_connection(("127.0.0.1", port), timeout=30) as sock:
            f = sock.makefile("rw", encoding="utf-8", newline="\n")
            for line, expect in [
                ("PING", "OK pong"),
                ("FORM 3 3", "OK"),
                ("WRITE 3 3 1", "OK"),
                ("READBIT 3 3", "OK 1"),
                ("READBIT 63 63", "ERR STATE"),
            ]:
                f.write(line + "\n")
                f.flush()
                reply = f.readline().strip()
                assert reply.startswith(expect)
            f.close()  # release the fd so the server sees EOF
        proc.wait(timeout=30)
        assert proc.returncode == 0
    finally:
        if proc.poll() is None:
            proc.kill()
            proc.wait()


def test_serve_tcp_session_persists_across_reconnects():
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "membench",
            "serve",
            "--port",
            "0",
            "--seed",
            "3",
            "--max-connections",
            "2",
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        banner = proc.stdout.readline().strip()
        port = int(banner.split()[-1])

        def ask(lines):
            replies = []
            with socket.create_connection(("127.0.0.1", port), timeout=30) as sock:
                f = sock.makefile("rw", encoding="utf-8", newline="\n")
                for line in lines:
                    f.write(line + "\n")
                    f.flush()
                    replies.append(f.readline().strip())
                f.close()
            return replies

        first = ask(["FORM 5 5", "WRITE 5 5 1"])
        assert first == ["OK", "OK"]
        # Same die on the second connection: the write is still there.
        second = ask(["READBIT 5 5"])
        assert second == ["OK 1"]
        proc.wait(timeout=30)
        assert proc.returncode == 0
    finally:
        if proc.poll() is None:
            proc.kill()
            proc.wait()
