"""Project configuration: a JSON file with paths resolved against its location."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

_REQUIRED_KEYS = {"project_name", "log_path", "releases_path"}
_OPTIONAL_KEYS = {
    "labels_path", "include_patterns", "fatty_threshold", "include_merges", "output_dir",
}


@dataclass
class ProjectConfig:
    project_name: str
    log_path: Path
    releases_path: Path
    labels_path: Path | None = None
    include_patterns: list[str] = field(default_factory=lambda: ["**/*"])
    fatty_threshold: int = 30
    include_merges: bool = False
    output_dir: Path = Path("out")

    def __post_init__(self):
        if not isinstance(self.fatty_threshold, int) or self.fatty_threshold < 1:
            raise ConfigError(f"fatty_threshold must be an integer >= 1, got {self.fatty_threshold!r}")
        if not isinstance(self.include_patterns, list) or not self.include_patterns or not all(
            isinstance(p, str) and p for p in self.include_patterns
        ):
            raise ConfigError("include_patterns must be a non-empty list of glob strings")


def load_config(path: str | Path) -> ProjectConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: expected a JSON object")
    unknown = set(raw) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise ConfigError(f"config {path}: missing keys {sorted(missing)}")

    base = path.parent

    def resolve(key):
        return base / raw[key] if key in raw and raw[key] is not None else None

    return ProjectConfig(
        project_name=raw["project_name"],
        log_path=base / raw["log_path"],
        releases_path=base / raw["releases_path"],
        labels_path=resolve("labels_path"),
        include_patterns=raw.get("include_patterns", ["**/*"]),
        fatty_threshold=raw.get("fatty_threshold", 30),
        include_merges=raw.get("include_merges", False),
        output_dir=base / raw.get("output_dir", "out"),
    )
