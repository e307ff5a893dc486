"""Run manifests: what was run, with which seeds, and digests of every output."""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .formats import FORMAT_VERSION, write_json

MANIFEST_NAME = "manifest.json"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: dict
    effective_config: dict
    tool_version: str
    rng_algorithm: str
    params: Optional[dict] = None
    spec: Optional[dict] = None
    master_seed: Optional[int] = None
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    output_files: list = field(default_factory=list)
    environment: dict = field(
        default_factory=lambda: {"python": platform.python_version(), "numpy": np.__version__}
    )
    format: str = FORMAT_VERSION

    def add_output(self, path, root) -> None:
        path = Path(path)
        self.output_files.append(
            {"path": path.relative_to(root).as_posix(), "sha256": sha256_file(path)}
        )

    def to_dict(self) -> dict:
        return asdict(self)


def write_manifest(manifest: RunManifest, out_dir) -> Path:
    return write_json(manifest.to_dict(), Path(out_dir) / MANIFEST_NAME)


def load_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def verify_manifest(path) -> list:
    """Paths whose digest no longer matches (or that are missing); empty when all verify."""
    path = Path(path)
    doc = load_manifest(path)
    bad = []
    for entry in doc["output_files"]:
        target = path.parent / entry["path"]
        if not target.exists() or sha256_file(target) != entry["sha256"]:
            bad.append(entry["path"])
    return bad
