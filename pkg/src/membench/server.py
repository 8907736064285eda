"""Transport for the bench protocol: TCP line server or stdio pipe.

One session object backs the whole server lifetime, so chip state persists
across client reconnects exactly like a powered die on a probe station.
Connections are served one at a time — the accept loop is the simulator
lock; concurrent clients simply queue.
"""

from __future__ import annotations

import socket
import sys

from .params import ChipConfig
from .protocol import BenchSession


def _serve_stream(session: BenchSession, rfile, wfile) -> None:
    """Pump one connection: a reply line (or block) per command line."""
    for raw in rfile:
        try:
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        except UnicodeDecodeError:
            reply = "ERR PARSE command is not valid utf-8"
        else:
            reply = session.handle_line(line)
        wfile.write((reply + "\n").encode("utf-8"))
        wfile.flush()


def serve_stdio(config: ChipConfig | None = None, seed: int | None = None) -> None:
    session = BenchSession(config, seed)
    print("MEMBENCH READY", flush=True)
    for line in sys.stdin:
        print(session.handle_line(line), flush=True)


def serve_tcp(
    host: str = "127.0.0.1",
    port: int = 0,
    config: ChipConfig | None = None,
    seed: int | None = None,
    max_connections: int | None = None,
) -> None:
    """Listen and serve until interrupted (or ``max_connections`` served).

    With ``port=0`` the OS picks a free port; the actual one is announced on
    stdout as ``MEMBENCH LISTENING <port>`` so callers can scrape it.
    """
    session = BenchSession(config, seed)
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as server:
        server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        server.bind((host, port))
        server.listen(8)
        actual_port = server.getsockname()[1]
        print(f"MEMBENCH LISTENING {actual_port}", flush=True)
        served = 0
        while max_connections is None or served < max_connections:
            try:
                conn, _addr = server.accept()
            except KeyboardInterrupt:
                break
            with conn:
                rfile = conn.makefile("rb")
                wfile = conn.makefile("wb")
                try:
                    _serve_stream(session, rfile, wfile)
                except (BrokenPipeError, ConnectionResetError):
                    pass  # client vanished mid-reply; the die lives on
                finally:
                    rfile.close()
                    try:
                        wfile.close()
                    except (BrokenPipeError, ConnectionResetError):
                        pass
            served += 1
