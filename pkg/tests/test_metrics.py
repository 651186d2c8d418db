import io
import random

import pytest

from cochange.entropy import entropy_report, zero_report
from cochange.errors import ConfigError
from cochange.graph import build_graph
from cochange.history import ChangeHistory, Commit, FileChange, ReleaseSpec
from cochange.metrics import (
    FULL_COLUMNS,
    build_metric_set,
    compute_row,
    compute_rows,
    write_metrics_csv,
)

from .conftest import mk_commit


def _reports(commits, graph):
    return entropy_report(commits, graph, "change"), entropy_report(commits, graph, "cochange")


@pytest.fixture
def small_window():
    """Four commits, three files, two authors; all metrics hand-checkable."""
    commits = [
        Commit("c1", 100, "alice", [FileChange("A", 10, 0), FileChange("B", 2, 1)]),
        Commit("c2", 200, "alice", [FileChange("A", 5, 5)]),
        Commit("c3", 300, "bob", [FileChange("A", 0, 3), FileChange("C", 7, 0)]),
        Commit("c4", 400, "alice", [FileChange("C", 1, 1)]),
    ]
    history = ChangeHistory(commits, [ReleaseSpec("r1", 0, 1000, "train")])
    graph = build_graph(commits)
    change, cochange = _reports(commits, graph)
    return compute_rows("r1", commits, graph, change, cochange, history)


class TestComputeRow:
    def test_hand_checked_window(self, small_window):
        by_file = {row.file: row for row in small_window}
        a = by_file["A"]
        assert (a.comm, a.adev, a.ddev) == (3, 2, 2)
        assert a.add == pytest.approx(15 / 23)
        assert a.del_ == pytest.approx(8 / 23)
        assert a.own == pytest.approx(2 / 3)
        assert a.minor == 0
        assert a.sctr == pytest.approx(0.7295739585136223, abs=1e-12)
        assert a.cce == pytest.approx(0.75, abs=1e-12)
        assert a.oexp == pytest.approx(0.75)  # alice owns A with 3 of 4 project commits
        assert a.exp == pytest.approx(0.4330127018922193, abs=1e-12)
        assert a.nadev == a.nddev == a.ncomm == pytest.approx(1.5)
        assert a.nsctr == pytest.approx(0.36478697925681114, abs=1e-12)
        assert a.ncce == pytest.approx(0.375, abs=1e-12)

        b = by_file["B"]
        assert (b.comm, b.adev, b.own, b.minor) == (1, 1, 1.0, 0)
        assert b.ncomm == pytest.approx(3.0)  # single neighbor A
        assert b.exp == pytest.approx(0.75)

    def test_toy_file_d_matches_printed_values(self, toy_commits, toy_graph, toy_history):
        change, cochange = _reports(toy_commits, toy_graph)
        row = compute_row("r1", "D", toy_commits, toy_graph, change, cochange, toy_history)
        assert row.comm == 3
        assert row.cce == pytest.approx(0.715, abs=1e-3)
        assert row.sctr == pytest.approx(0.202, abs=2e-3)

    def test_toy_file_b_neighbor_average(self, toy_commits, toy_graph, toy_history):
        change, cochange = _reports(toy_commits, toy_graph)
        row = compute_row("r1", "B", toy_commits, toy_graph, change, cochange, toy_history)
        assert row.ncomm == pytest.approx(3.0)  # B's only neighbor is D

    def test_sole_author_owns_file(self, toy_commits, toy_graph, toy_history):
        change, cochange = _reports(toy_commits, toy_graph)
        row = compute_row("r1", "A", toy_commits, toy_graph, change, cochange, toy_history)
        assert row.own == 1.0
        assert row.minor == 0

    def test_file_absent_from_window_is_lookup_error(self, toy_commits, toy_graph, toy_history):
        change, cochange = _reports(toy_commits, toy_graph)
        with pytest.raises(KeyError):
            compute_row("r1", "nope", toy_commits, toy_graph, change, cochange, toy_history)

    def test_unknown_release_rejected(self, toy_commits, toy_graph, toy_history):
        change, cochange = _reports(toy_commits, toy_graph)
        with pytest.raises(ConfigError):
            compute_rows("r9", toy_commits, toy_graph, change, cochange, toy_history)


class TestNeighborAggregates:
    def test_clique_of_identical_files_averages_to_base(self):
        commits = [mk_commit(f"c{i}", i * 10, ["X", "Y", "Z"]) for i in range(1, 4)]
        history = ChangeHistory(commits, [ReleaseSpec("r1", 0, 100, "train")])
        graph = build_graph(commits)
        rows = compute_rows("r1", commits, graph, *_reports(commits, graph), history)
        for row in rows:
            assert row.ncomm == pytest.approx(row.comm)
            assert row.nadev == pytest.approx(row.adev)
            assert row.nddev == pytest.approx(row.ddev)
            assert row.nsctr == pytest.approx(row.sctr, abs=1e-12)

    def test_isolated_file_aggregates_zero(self):
        commits = [mk_commit("c1", 10, ["P", "Q"]), mk_commit("c2", 20, ["S"])]
        history = ChangeHistory(commits, [ReleaseSpec("r1", 0, 100, "train")])
        graph = build_graph(commits)
        rows = compute_rows("r1", commits, graph, *_reports(commits, graph), history)
        solo = next(r for r in rows if r.file == "S")
        assert solo.nadev == solo.nddev == solo.ncomm == solo.nsctr == solo.ncce == 0.0

    def test_own_bounded_below_by_uniform_share(self):
        rng = random.Random(7)
        authors = ["a1", "a2", "a3", "a4"]
        commits = [
            mk_commit(f"c{i}", i, ["shared"], author=rng.choice(authors))
            for i in range(30)
        ]
        history = ChangeHistory(commits, [ReleaseSpec("r1", 0, 100, "train")])
        graph = build_graph(commits)
        change = entropy_report(commits, graph, "change")
        cochange = zero_report(graph.nodes, "cochange")  # edgeless window
        (row,) = compute_rows("r1", commits, graph, change, cochange, history)
        assert row.own >= 1 / row.adev


class TestMetricSets:
    def test_p_c_drops_cce(self, small_window):
        table = build_metric_set(small_window, "P+C")
        assert "cce" not in table.columns
        assert "sctr" in table.columns

    def test_p_co_replaces_change_entropy(self, small_window):
        table = build_metric_set(small_window, "P+Co")
        assert "sctr" not in table.columns
        assert "cce" in table.columns
        # nsctr is rebuilt from co-change entropy under P+Co.
        row_a = table.rows[0]
        assert row_a[table.columns.index("nsctr")] == repr(0.375)

    def test_p_c_co_keeps_both(self, small_window):
        table = build_metric_set(small_window, "P+C+Co")
        assert table.columns == FULL_COLUMNS
        row_a = table.rows[0]
        assert row_a[table.columns.index("nsctr")] == repr(0.36478697925681114)

    def test_projections_differ_only_in_entropy_columns(self, small_window):
        tables = {s: build_metric_set(small_window, s) for s in ("P+C", "P+Co", "P+C+Co")}
        assert set(tables["P+C+Co"].columns) - set(tables["P+C"].columns) == {"cce"}
        assert set(tables["P+C+Co"].columns) - set(tables["P+Co"].columns) == {"sctr"}
        shared = [c for c in tables["P+C"].columns if c in tables["P+Co"].columns and c != "nsctr"]
        for i in range(len(small_window)):
            for column in shared:
                values = {
                    s: t.rows[i][t.columns.index(column)] for s, t in tables.items()
                }
                assert len(set(values.values())) == 1, column

    def test_unknown_set_rejected(self, small_window):
        with pytest.raises(ConfigError):
            build_metric_set(small_window, "P+X")


def test_export_is_deterministic(small_window):
    first, second = io.StringIO(), io.StringIO()
    write_metrics_csv(small_window, first)
    write_metrics_csv(small_window, second)
    assert first.getvalue() == second.getvalue()
    header = first.getvalue().splitlines()[0]
    assert header == ",".join(FULL_COLUMNS)
    assert header == (
        "release,file,comm,adev,ddev,add,del,own,minor,sctr,cce,"
        "nadev,nddev,ncomm,nsctr,oexp,exp,defect_count,label"
    )
