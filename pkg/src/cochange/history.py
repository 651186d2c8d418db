"""Change-log parsing, release windows, and commit filters.

Input log format (one record per commit, oldest first, as produced by
``git log --reverse --no-merges --pretty=format:'@%H|%at|%ae' --numstat``):

    @<hash>|<unix-ts>|<author>
    <added>\t<deleted>\t<path>
    ...

Numstat lines belong to the most recent ``@`` header; ``-`` in a count
column marks a binary change and is recorded as 0/0. Blank lines are
ignored. All parsed structures are treated as immutable after load.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import ConfigError, ParseError, ValidationError

RELEASE_ROLES = ("train", "test")
FATTY_THRESHOLD_DEFAULT = 30


@dataclass
class FileChange:
    """One file touched by one commit, with its line deltas."""

    path: str
    lines_added: int = 0
    lines_deleted: int = 0

    def __post_init__(self):
        if not self.path:
            raise ValidationError("file change with empty path")
        if self.lines_added < 0 or self.lines_deleted < 0:
            raise ValidationError(f"negative line counts for {self.path!r}")


@dataclass
class Commit:
    """One revision: identity, author, and the files it changed."""

    id: str
    timestamp: int
    author: str
    changes: list[FileChange] = field(default_factory=list)
    is_merge: bool = False

    def __post_init__(self):
        paths = [c.path for c in self.changes]
        if len(paths) != len(set(paths)):
            raise ValidationError(f"commit {self.id}: duplicate paths in change list")

    @property
    def paths(self) -> list[str]:
        return [c.path for c in self.changes]


@dataclass
class ReleaseSpec:
    """A release window (previous release time, release time] and its role."""

    name: str
    start_time: int
    end_time: int
    role: str = "train"

    def __post_init__(self):
        if self.start_time >= self.end_time:
            raise ValidationError(
                f"release {self.name!r}: start_time {self.start_time} "
                f"must be < end_time {self.end_time}"
            )
        if self.role not in RELEASE_ROLES:
            raise ValidationError(f"release {self.name!r}: unknown role {self.role!r}")

    def contains(self, timestamp: int) -> bool:
        return self.start_time < timestamp <= self.end_time


@dataclass
class ChangeHistory:
    """Commits (kept sorted by timestamp, stably) plus the release plan."""

    commits: list[Commit]
    releases: list[ReleaseSpec] = field(default_factory=list)

    def __post_init__(self):
        self.commits = sorted(self.commits, key=lambda c: c.timestamp)
        names = [r.name for r in self.releases]
        if len(names) != len(set(names)):
            raise ValidationError("release names are not unique")


_HEADER_RE = re.compile(r"^@([^|]+)\|(\d+)\|(.*)$")


def parse_change_log(stream: Iterable[str]) -> list[Commit]:
    """Parse the numstat log format into commits, oldest first as given.

    Duplicate paths inside one record are merged by summing their line
    counts. Raises ParseError (with line number) on malformed input.
    """
    commits: list[Commit] = []
    header = None  # (id, timestamp, author)
    changes: dict[str, FileChange] = {}

    def flush():
        if header is not None:
            commits.append(
                Commit(
                    id=header[0],
                    timestamp=header[1],
                    author=header[2],
                    changes=list(changes.values()),
                )
            )

    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("@"):
            m = _HEADER_RE.match(line)
            if not m:
                raise ParseError(f"malformed commit header {line!r}", lineno)
            flush()
            header = (m.group(1), int(m.group(2)), m.group(3))
            changes = {}
            continue
        if header is None:
            raise ParseError(f"change line {line!r} before any commit header", lineno)
        parts = line.split("\t", 2)
        if len(parts) != 3 or not parts[2]:
            raise ParseError(f"malformed change line {line!r}", lineno)
        added_s, deleted_s, path = parts
        try:
            # "-" marks a binary change: no line counts.
            added = 0 if added_s == "-" else int(added_s)
            deleted = 0 if deleted_s == "-" else int(deleted_s)
        except ValueError:
            raise ParseError(f"unparseable line counts in {line!r}", lineno) from None
        if path in changes:
            prev = changes[path]
            prev.lines_added += added
            prev.lines_deleted += deleted
        else:
            changes[path] = FileChange(path, added, deleted)
    flush()
    return commits


def write_change_log(commits: Iterable[Commit], stream: IO[str]) -> None:
    """Serialize commits back into the input log format (round-trip safe)."""
    for commit in commits:
        stream.write(f"@{commit.id}|{commit.timestamp}|{commit.author}\n")
        for ch in commit.changes:
            stream.write(f"{ch.lines_added}\t{ch.lines_deleted}\t{ch.path}\n")


def load_releases(stream: Iterable[str]) -> list[ReleaseSpec]:
    """Read the release CSV (header: name,start_time,end_time,role)."""
    reader = csv.DictReader(stream)
    required = {"name", "start_time", "end_time", "role"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ValidationError(
            f"release file must have columns {sorted(required)}, got {reader.fieldnames}"
        )
    releases = []
    for row in reader:
        try:
            releases.append(
                ReleaseSpec(
                    name=row["name"],
                    start_time=int(row["start_time"]),
                    end_time=int(row["end_time"]),
                    role=row["role"].strip(),
                )
            )
        except ValueError as exc:
            raise ValidationError(f"release {row.get('name')!r}: {exc}") from None
    return releases


def assign_release_windows(history: ChangeHistory) -> dict[str, list[Commit]]:
    """Assign each commit to the release window (start, end] containing it.

    Windows must be pairwise disjoint; overlapping windows raise ConfigError
    naming the offending pair. Commits outside every window are dropped.
    """
    releases = history.releases
    by_start = sorted(releases, key=lambda r: r.start_time)
    for a, b in zip(by_start, by_start[1:]):
        if b.start_time < a.end_time:
            raise ConfigError(
                f"release windows {a.name!r} and {b.name!r} overlap "
                f"({a.start_time},{a.end_time}] vs ({b.start_time},{b.end_time}]"
            )
    windows: dict[str, list[Commit]] = {r.name: [] for r in releases}
    for commit in history.commits:
        for release in releases:
            if release.contains(commit.timestamp):
                windows[release.name].append(commit)
                break
    return windows


def filter_fatty(commits: list[Commit], threshold: int = FATTY_THRESHOLD_DEFAULT) -> list[Commit]:
    """Drop noise commits changing more than `threshold` files (strict >)."""
    if threshold < 1:
        raise ValidationError(f"fatty threshold must be >= 1, got {threshold}")
    return [c for c in commits if len(c.changes) <= threshold]


def filter_merges(commits: list[Commit]) -> list[Commit]:
    return [c for c in commits if not c.is_merge]


def filter_source_files(commits: list[Commit], include_patterns: list[str]) -> list[Commit]:
    """Restrict commits to paths matching any pattern; drop commits left empty.

    Patterns are path globs: `*` and `?` stay inside one path segment,
    `**` spans any number of segments (including zero), `[...]` is a
    character class. `**/*` therefore matches every path.
    """
    matchers = [_compile_glob(p) for p in _checked_patterns(include_patterns)]
    filtered = []
    for commit in commits:
        kept = [ch for ch in commit.changes if any(m.match(ch.path) for m in matchers)]
        if kept:
            filtered.append(
                Commit(commit.id, commit.timestamp, commit.author, kept, commit.is_merge)
            )
    return filtered


def _checked_patterns(patterns: list[str]) -> list[str]:
    if not patterns:
        raise ConfigError("include_patterns must not be empty")
    for p in patterns:
        if not isinstance(p, str) or not p:
            raise ConfigError(f"invalid glob pattern {p!r}")
    return patterns


def _compile_glob(pattern: str) -> re.Pattern[str]:
    segments = pattern.split("/")
    parts = []
    for i, segment in enumerate(segments):
        last = i == len(segments) - 1
        if segment == "**":
            # Zero or more whole path segments; as a trailing segment it
            # swallows the rest of the path.
            parts.append(".*" if last else r"(?:[^/]+/)*")
        else:
            parts.append(_translate_segment(segment, pattern) + ("" if last else "/"))
    return re.compile("^" + "".join(parts) + "$")


def _translate_segment(segment: str, pattern: str) -> str:
    out = []
    i = 0
    while i < len(segment):
        ch = segment[i]
        if ch == "*":
            out.append("[^/]*")
        elif ch == "?":
            out.append("[^/]")
        elif ch == "[":
            j = segment.find("]", i + 1)
            if j == -1:
                raise ConfigError(f"invalid glob pattern {pattern!r}: unterminated '['")
            body = segment[i + 1 : j]
            if body.startswith("!"):
                body = "^" + body[1:]
            out.append(f"[{body}]")
            i = j
        else:
            out.append(re.escape(ch))
        i += 1
    return "".join(out)
