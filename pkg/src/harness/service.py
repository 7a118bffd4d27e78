"""
Evaluation service for external optimizers.

Newline-delimited JSON, one request per line, one response per line:

    {"op": "info"}
    {"op": "eval", "z": [...], "fidelity": {"discrete": 3}}   # fidelity optional
        -> {"loss": ..., "raw_loss": ..., "cost_units": ..., "clipped": false}

Failures never close the connection; they are answered with
{"error": <code>, "message": ...} where code is one of parse, dimension,
fidelity, unknown_op, or the code of the raised package error.
"""
from __future__ import annotations

import asyncio
import json
import math
import sys
from typing import IO, Any, Optional

from pydantic import ValidationError

from src.benchgen.benchmark import Benchmark
from src.benchgen.fidelity import DISCRETE_TOLERANCES, HIGHEST_TOL, LOWEST_TOL, FidelitySpec
from src.config.logging import get_logger
from src.errors import BenchError, DimensionError
from src.harness.evaluator import evaluate_point

logger = get_logger(__name__)


def _error(code: str, message: str, **extra: Any) -> dict:
    return {"error": code, "message": message, **extra}


def _is_finite_number(value: Any) -> bool:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    try:
        return math.isfinite(value)
    except OverflowError:
        return False


class EvalService:
    """Stateless request handler bound to one benchmark."""

    def __init__(self, bench: Benchmark):
        self.bench = bench

    def info(self) -> dict:
        schedule = self.bench.fidelity
        return {
            "name": self.bench.name,
            "d": self.bench.d,
            "bounds": [-1.0, 1.0],
            "lam_bounds": [self.bench.lam_min, self.bench.lam_max],
            "fidelity": {
                "mode": schedule.mode,
                "discrete": list(DISCRETE_TOLERANCES),
                "continuous": [LOWEST_TOL, HIGHEST_TOL],
                "default": schedule.default.model_dump(exclude_none=True),
            },
        }

    def evaluate(self, z, fidelity: Optional[FidelitySpec] = None) -> dict:
        value, clipped = evaluate_point(self.bench, z, fidelity)
        return {
            "loss": value.objective,
            "raw_loss": value.loss,
            "cost_units": value.cost,
            "clipped": clipped,
        }

    def _handle_eval(self, request: dict) -> dict:
        z = request.get("z")
        if not isinstance(z, list) or not all(_is_finite_number(v) for v in z):
            return _error("parse", "'z' must be a list of finite numbers")
        fidelity = None
        if request.get("fidelity") is not None:
            try:
                fidelity = FidelitySpec.model_validate(request["fidelity"])
            except ValidationError as exc:
                return _error("fidelity", str(exc.errors()[0]["msg"]))
        try:
            return self.evaluate(z, fidelity)
        except DimensionError as exc:
            return _error("dimension", str(exc), expected=exc.expected)

    def handle(self, request: Any) -> dict:
        if not isinstance(request, dict):
            return _error("parse", "request must be a JSON object")
        op = request.get("op")
        try:
            if op == "info":
                return self.info()
            if op == "eval":
                return self._handle_eval(request)
        except BenchError as exc:
            logger.error("request failed: %s", exc)
            return _error(exc.code, str(exc))
        return _error("unknown_op", f"unknown op {op!r}; expected 'info' or 'eval'")

    def handle_line(self, line: str) -> str:
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            response = _error("parse", f"malformed JSON: {exc.msg}")
        except ValueError as exc:
            response = _error("parse", f"malformed JSON: {exc}")
        else:
            response = self.handle(request)
        return json.dumps(response)


def serve_stdio(service: EvalService, stdin: IO[str] = None, stdout: IO[str] = None) -> None:
    """Answer requests from stdin on stdout until end of input."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    logger.info("serving %s over stdio", service.bench.name)
    for line in stdin:
        if not line.strip():
            continue
        stdout.write(service.handle_line(line) + "\n")
        stdout.flush()


async def _serve_connection(service: EvalService, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
    peer = writer.get_extra_info("peername")
    logger.info("client connected: %s", peer)
    try:
        while True:
            raw = await reader.readline()
            if not raw:
                break
            line = raw.decode("utf-8", errors="replace")
            if not line.strip():
                continue
            response = await asyncio.to_thread(service.handle_line, line)
            writer.write((response + "\n").encode("utf-8"))
            await writer.drain()
    except ConnectionError as exc:
        logger.warning("connection to %s dropped: %s", peer, exc)
    finally:
        writer.close()
        logger.info("client disconnected: %s", peer)


async def serve_tcp(service: EvalService, host: str = "127.0.0.1", port: int = 8765) -> None:
    """Serve connections concurrently; each request runs in a worker thread."""
    server = await asyncio.start_server(
        lambda reader, writer: _serve_connection(service, reader, writer), host, port
    )
    logger.info("serving %s on tcp://%s:%d", service.bench.name, host, port)
    async with server:
        await server.serve_forever()
