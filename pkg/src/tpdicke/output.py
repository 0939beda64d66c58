"""Deterministic CSV emission and run manifests.

Every CSV uses LF line endings, a fixed column order, and floats printed to
17 significant digits, so a rerun with the same inputs is byte-identical.
The JSON manifest binds each output file to the exact parameters and knobs
that produced it, with a content hash per file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .model import ModelParams


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> str:
    """Write rows (iterables of cells) under a header; returns the sha256."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(cell) for cell in row) + "\n")
    return file_sha256(path)


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Self-contained record of one CLI run: command, parameters, knobs, outputs."""

    command: str
    params: dict
    knobs: dict
    outputs: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    timestamp: str = ""

    def add_output(self, path: Path, sha256: str):
        self.outputs.append({"path": str(path), "sha256": sha256})

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.timestamp = datetime.now(timezone.utc).isoformat()
        with open(path, "w", newline="\n") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def params_dict(params: ModelParams) -> dict:
    return {
        "omega": params.omega,
        "omega0": params.omega0,
        "gamma": params.gamma,
        "j": params.j,
        "two_j": params.two_j,
        "n_max": params.n_max,
    }
