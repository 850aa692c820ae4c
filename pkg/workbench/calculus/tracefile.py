"""JSON-lines traces: a header with the start network, one record per step and
a footer. Every line carries `chain`, the sha256 of the previous chain and the
line's own content, so any edit to any line is caught on replay."""
from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import TraceMismatch, WorkbenchError
from .lts import Dialect
from .network import Computation, Network, canonical_state, network_key, network_transitions
from .syntax import name, parse

logger = logging.getLogger(__name__)

TOOL = "pi-election-workbench"
VERSION = "0.1.0"

_FRESH_TOKEN = re.compile(r"[A-Za-z][A-Za-z0-9_]*~\d+")


def mask_fresh(text: str) -> str:
    """Hide fresh-name counters, which differ from one session to the next."""
    return _FRESH_TOKEN.sub("~", text)


def signature(step) -> str:
    movers = ";".join(f"{m.node}:{m.action}:{m.derivation}" for m in step.movers)
    return mask_fresh(f"{step.rule}|{step.label}|{movers}")


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _chained(record: dict, previous: str) -> dict:
    body = _dump({k: v for k, v in record.items() if k != "chain"})
    return {**record, "chain": hashlib.sha256((previous + body).encode("utf-8")).hexdigest()}


class TraceWriter:
    """Context manager writing a trace file line by line."""

    def __init__(self, path, net: Network, d: Dialect, command: str, automorphism=None,
                 verbose: bool = False):
        self.path = Path(path)
        self.net = net
        self.dialect = d
        self.command = command
        self.automorphism = automorphism
        self.verbose = verbose
        self._chain = ""
        self._index = 0
        self._file = None

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = self.path.open("w", encoding="utf-8")
        header = {"kind": "header", "tool": TOOL, "version": VERSION, "command": self.command,
                  "dialect": self.dialect.value,
                  "identifiers": list(self.net.identifiers),
                  "components": [str(c) for c in self.net.components],
                  "hoisted": [str(h) for h in self.net.hoisted],
                  "start": network_key(self.net)}
        if self.automorphism is not None:
            header["automorphism"] = self.automorphism.to_json()
        self._write(header)
        return self

    def _write(self, record):
        record = _chained(record, self._chain)
        self._chain = record["chain"]
        self._file.write(_dump(record) + "\n")

    def step(self, step):
        self._index += 1
        record = {"kind": "step", "index": self._index, "rule": step.rule,
                  "label": str(step.label), "signature": signature(step),
                  "movers": [[m.node, str(m.action), str(m.derivation)] for m in step.movers],
                  "extruded": None if step.extruded is None else str(step.extruded),
                  "post": network_key(step.post)}
        if self.verbose:
            record["state"] = canonical_state(step.post)
        self._write(record)

    def footer(self, **data):
        self._write({"kind": "footer", "steps": self._index, **data})

    def __exit__(self, exc_type, exc, tb):
        self._file.close()
        logger.info("trace written to %s (%d steps)", self.path, self._index)
        return False


def write_trace(path, computation: Computation, d: Dialect, command: str, automorphism=None,
                verbose=False, **footer):
    with TraceWriter(path, computation.start, d, command, automorphism, verbose) as writer:
        for step in computation.steps:
            writer.step(step)
        writer.footer(**footer)
    return Path(path)


@dataclass
class ReplayResult:
    steps: int
    network: Network | None
    footer: dict | None

    def to_json(self):
        return {"result": "ok", "steps": self.steps, "footer": self.footer}


def _network_from_header(header: dict) -> Network:
    return Network([parse(text) for text in header["components"]],
                   tuple(name(h) for h in header.get("hoisted", [])),
                   header["identifiers"])


def replay(path) -> ReplayResult:
    """Re-derive every step of a trace; raise TraceMismatch at the first bad record."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        return ReplayResult(0, None, None)
    chain, net, d, steps, footer = "", None, None, 0, None
    for index, line in enumerate(lines):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise TraceMismatch(f"not JSON: {err}", index) from err
        if not isinstance(record, dict) or _dump(record) != line:
            raise TraceMismatch("line is not in canonical form", index)
        expected = _chained(record, chain)["chain"]
        if record.get("chain") != expected:
            raise TraceMismatch("chain hash does not match", index)
        chain = expected
        kind = record.get("kind")
        if index == 0:
            if kind != "header":
                raise TraceMismatch("the first record must be the header", index)
            try:
                d = Dialect(record["dialect"])
                net = _network_from_header(record)
            except (KeyError, ValueError, WorkbenchError) as err:
                raise TraceMismatch(f"bad header: {err}", index) from err
            if network_key(net) != record.get("start"):
                raise TraceMismatch("start network hash does not match", index)
            continue
        if footer is not None:
            raise TraceMismatch("record after the footer", index)
        if kind == "footer":
            if record.get("steps") != steps:
                raise TraceMismatch(f"footer counts {record.get('steps')} steps, found {steps}", index)
            footer = record
            continue
        if kind != "step" or record.get("index") != steps + 1:
            raise TraceMismatch("expected the next step record", index)
        candidates = [s for s in network_transitions(net, d) if signature(s) == record.get("signature")]
        if not candidates:
            raise TraceMismatch(f"step {record.get('signature')} is not enabled", index)
        step = candidates[0]
        if mask_fresh(str(step.label)) != mask_fresh(record.get("label", "")):
            raise TraceMismatch("label does not match the step", index)
        if network_key(step.post) != record.get("post"):
            raise TraceMismatch("post-state hash does not match", index)
        net = step.post
        steps += 1
    return ReplayResult(steps, net, footer)
