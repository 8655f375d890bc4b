"""Search bounds and the ``key=value`` config file format."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class Bounds:
    labeled_order: int = 5
    iso_order: int = 6
    power_order: int = 12
    embed_order: int = 5
    embed_degree: int = 3
    wrap_order: int = 4
    law_order: int = 4
    closure_cap: int = 100_000
    max_len: int = 14
    max_steps: int = 1_000_000
    orbit_len: int = 9
    jobs: int = 1

    def replace(self, **changes) -> "Bounds":
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


DEFAULT_BOUNDS = Bounds()


def parse_config(text: str) -> dict[str, int]:
    known = {f.name for f in fields(Bounds)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"line {lineno}: unknown bound {key!r}")
        out[key] = int(value)
    return out


def load_bounds(path: str | os.PathLike | None = None, **overrides) -> Bounds:
    """Defaults, then the config file, then ``LEFKIT_JOBS``, then explicit overrides."""
    bounds = DEFAULT_BOUNDS
    if path is not None:
        bounds = bounds.replace(**parse_config(Path(path).read_text()))
    env_jobs = os.environ.get("LEFKIT_JOBS")
    if env_jobs:
        bounds = bounds.replace(jobs=int(env_jobs))
    return bounds.replace(**overrides)
