"""Sidecar manifests for on-disk artifacts.

Every artifact gets an ``<artifact>.manifest.json`` recording the tool
version, the producing command, the master seed and a canonical hash of
the effective configuration. Manifests never contain timestamps, so a
rerun with identical inputs reproduces identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from cropmeta import __version__

MANIFEST_SUFFIX = ".manifest.json"


def config_hash(config: dict) -> str:
    """SHA-256 over the canonical JSON encoding of a configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def manifest_path(artifact: str | Path) -> Path:
    return Path(str(artifact) + MANIFEST_SUFFIX)


def write_manifest(artifact: str | Path, command: str, master_seed: int,
                   config: dict) -> Path:
    doc = {
        "tool_version": __version__,
        "command": command,
        "master_seed": master_seed,
        "config_hash": config_hash(config),
        "config": config,
    }
    path = manifest_path(artifact)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(artifact: str | Path) -> dict | None:
    """The manifest of an artifact, or None when there is none."""
    path = manifest_path(artifact)
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def seed_mismatch_warning(artifacts: dict[str, str | Path]) -> str | None:
    """Warning text when artifacts record different master seeds.

    ``artifacts`` maps a short label (e.g. "model") to the artifact path.
    Artifacts without a manifest are skipped.
    """
    seeds: dict[str, int] = {}
    for label, path in artifacts.items():
        doc = read_manifest(path)
        if doc is not None and "master_seed" in doc:
            seeds[label] = doc["master_seed"]
    if len(set(seeds.values())) > 1:
        desc = ", ".join(f"{label} (seed {seed})" for label, seed in sorted(seeds.items()))
        return f"warning: mixing artifacts from different master seeds: {desc}"
    return None
