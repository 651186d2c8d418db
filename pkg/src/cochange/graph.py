"""Unweighted co-change graph over the files of one commit window.

Nodes are every file changed in the window; an edge connects two files
that appear together in at least one commit. Edge keys are canonical
(lexicographically ordered) pairs so graphs compare and export
deterministically. The per-edge co-change count is kept as a diagnostic
weight only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Iterable

from .errors import DegenerateInputError
from .history import Commit


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass
class CoChangeGraph:
    nodes: set[str] = field(default_factory=set)
    co_change_count: dict[tuple[str, str], int] = field(default_factory=dict)
    adjacency: dict[str, set[str]] = field(default_factory=dict)

    @property
    def edges(self) -> set[tuple[str, str]]:
        return set(self.co_change_count)

    @property
    def edge_count(self) -> int:
        return len(self.co_change_count)

    def degree(self, node: str) -> int:
        """Number of distinct incident edges. Unknown node -> KeyError."""
        if node not in self.nodes:
            raise KeyError(node)
        return len(self.adjacency.get(node, ()))

    def neighbors(self, node: str) -> list[str]:
        if node not in self.nodes:
            raise KeyError(node)
        return sorted(self.adjacency.get(node, ()))

    def weighted_degree(self, node: str) -> int:
        """Sum of co-change counts over incident edges."""
        if node not in self.nodes:
            raise KeyError(node)
        return sum(self.co_change_count[edge_key(node, nb)] for nb in self.adjacency.get(node, ()))

    def cochange_probabilities(self) -> dict[str, float]:
        """p'_k = degree(k) / (2|E|), over all nodes (isolated nodes get 0)."""
        if self.edge_count == 0:
            raise DegenerateInputError("co-change graph has no edges")
        denom = 2 * self.edge_count
        return {node: self.degree(node) / denom for node in sorted(self.nodes)}

    def weighted_cochange_probabilities(self) -> dict[str, float]:
        """p_k = weighted_degree(k) / sum of all weighted degrees."""
        if self.edge_count == 0:
            raise DegenerateInputError("co-change graph has no edges")
        wdeg = {node: self.weighted_degree(node) for node in sorted(self.nodes)}
        total = sum(wdeg.values())
        return {node: w / total for node, w in wdeg.items()}

    def edge_rows(self) -> list[tuple[str, str, int]]:
        return [(a, b, self.co_change_count[(a, b)]) for a, b in sorted(self.co_change_count)]


def build_graph(commits: Iterable[Commit]) -> CoChangeGraph:
    """Build the co-change graph of an already windowed/filtered commit list.

    Order-independent: any permutation of the commits yields an equal graph.
    """
    graph = CoChangeGraph()
    for commit in commits:
        paths = commit.paths
        graph.nodes.update(paths)
        for a, b in combinations(sorted(paths), 2):
            key = edge_key(a, b)
            graph.co_change_count[key] = graph.co_change_count.get(key, 0) + 1
            graph.adjacency.setdefault(a, set()).add(b)
            graph.adjacency.setdefault(b, set()).add(a)
    return graph


def write_edge_list(graph: CoChangeGraph, stream: IO[str]) -> None:
    """Export `file_a,file_b,count`, rows sorted lexicographically."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["file_a", "file_b", "count"])
    for a, b, count in graph.edge_rows():
        writer.writerow([a, b, count])
