from __future__ import annotations

from pathlib import Path

import pytest

from cochange.graph import build_graph
from cochange.history import ChangeHistory, Commit, FileChange, ReleaseSpec

DATA = Path(__file__).parent / "data"

# The 12-commit, 4-file history: nine commits touch {A, C}, then
# {A, D}, {C, D}, {B, D}.
TOY_PAIRS = [("A", "C")] * 9 + [("A", "D"), ("C", "D"), ("B", "D")]


def mk_commit(cid, ts, paths, author="alice@example.com", added=1, deleted=0, merge=False):
    return Commit(
        id=str(cid),
        timestamp=ts,
        author=author,
        changes=[FileChange(p, added, deleted) for p in paths],
        is_merge=merge,
    )


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def toy_commits() -> list[Commit]:
    return [mk_commit(f"c{i:02d}", i * 100, pair) for i, pair in enumerate(TOY_PAIRS, 1)]


@pytest.fixture
def toy_graph(toy_commits):
    return build_graph(toy_commits)


@pytest.fixture
def toy_history(toy_commits) -> ChangeHistory:
    return ChangeHistory(
        commits=toy_commits,
        releases=[ReleaseSpec("r1", 0, 1200, "train")],
    )
