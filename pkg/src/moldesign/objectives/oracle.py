"""Client for external activity-coefficient oracles.

Transport is newline-delimited JSON over either a child process's standard
streams or a TCP connection. One request line carries a batch of
(solute, solvent, temperature) triples; the response carries ln(gamma_inf)
values aligned by index, null where the oracle has no answer. Ids must match
strictly. Responses are cached per (solute, solvent, temperature) for the
lifetime of the client.
"""

from __future__ import annotations

import json
import os
import select
import shlex
import socket
import subprocess
from typing import Optional

from ..errors import OracleTimeout, OracleUnreachable, ProtocolError

ENV_COMMAND_OVERRIDE = "MOLDESIGN_ORACLE_CMD"


class OracleClient:
    def __init__(self, command=None, tcp=None, timeout: float = 30.0):
        override = os.environ.get(ENV_COMMAND_OVERRIDE)
        if override:
            command, tcp = shlex.split(override), None
        if (command is None) == (tcp is None):
            raise ValueError("specify exactly one of command / tcp")
        self.timeout = timeout
        self._next_id = 0
        self._cache: dict = {}
        self._proc = None
        self._sock = None
        self._buffer = b""
        if command is not None:
            try:
                self._proc = subprocess.Popen(
                    command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                )
            except OSError as exc:
                raise OracleUnreachable(f"cannot start oracle {command!r}: {exc}") from exc
            self._read_fd = self._proc.stdout.fileno()
        else:
            host, port = tcp
            try:
                self._sock = socket.create_connection((host, port), timeout=timeout)
            except OSError as exc:
                raise OracleUnreachable(f"cannot connect to oracle at {host}:{port}: {exc}") from exc
            self._sock.setblocking(False)
            self._read_fd = self._sock.fileno()

    # --- transport ---

    def _send(self, line: bytes) -> None:
        try:
            if self._proc is not None:
                if self._proc.poll() is not None:
                    raise OracleUnreachable("oracle process has exited")
                self._proc.stdin.write(line)
                self._proc.stdin.flush()
            else:
                self._sock.sendall(line)
        except (BrokenPipeError, OSError) as exc:
            raise OracleUnreachable(f"oracle connection lost: {exc}") from exc

    def _read_line(self) -> bytes:
        import time

        deadline = time.monotonic() + self.timeout
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise OracleTimeout(f"no oracle response within {self.timeout}s")
            ready, _, _ = select.select([self._read_fd], [], [], remaining)
            if not ready:
                continue
            if self._proc is not None:
                chunk = os.read(self._read_fd, 65536)
            else:
                try:
                    chunk = self._sock.recv(65536)
                except BlockingIOError:
                    continue
            if not chunk:
                raise OracleUnreachable("oracle closed the connection")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line

    # --- protocol ---

    def query(self, pairs: list) -> list:
        """ln(gamma_inf) for each (solute, solvent, temperature_K) triple;
        entries are floats or None. Cached results are reused."""
        for _, _, temp in pairs:
            if not temp > 0:
                raise ValueError(f"temperature must be positive, got {temp}")
        keys = [(solute, solvent, float(temp)) for solute, solvent, temp in pairs]
        missing = []
        seen = set()
        for key in keys:
            if key not in self._cache and key not in seen:
                seen.add(key)
                missing.append(key)
        if missing:
            request_id = self._next_id
            self._next_id += 1
            request = {
                "id": request_id,
                "pairs": [[s, v, t] for s, v, t in missing],
            }
            self._send(json.dumps(request).encode() + b"\n")
            line = self._read_line()
            try:
                response = json.loads(line.decode())
            except ValueError as exc:
                raise ProtocolError(f"malformed oracle response: {line[:200]!r}") from exc
            if response.get("id") != request_id:
                raise ProtocolError(
                    f"oracle response id {response.get('id')} != request id {request_id}"
                )
            if "error" in response:
                raise ProtocolError(f"oracle error: {response['error']}")
            values = response.get("ln_gamma_inf")
            if not isinstance(values, list) or len(values) != len(missing):
                raise ProtocolError(
                    f"expected {len(missing)} values, got {values!r:.200}"
                )
            for key, value in zip(missing, values):
                if value is not None and not isinstance(value, (int, float)):
                    raise ProtocolError(f"non-numeric ln_gamma value {value!r}")
                self._cache[key] = None if value is None else float(value)
        return [self._cache[key] for key in keys]

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
