import csv
import shutil

import numpy as np
import pytest

from cochange.cli import main

from .conftest import DATA


def _copy_project(tmp_path, names):
    for name in names:
        shutil.copy(DATA / name, tmp_path / name)


@pytest.fixture
def toy_project(tmp_path):
    _copy_project(tmp_path, ["toy.cfg", "toy.log", "toy_releases.csv"])
    return tmp_path / "toy.cfg"


@pytest.fixture
def demo_project(tmp_path):
    _copy_project(
        tmp_path, ["demo.cfg", "demo.log", "demo_releases.csv", "demo_labels.csv"]
    )
    return tmp_path / "demo.cfg"


class TestArgumentHandling:
    def test_no_arguments_prints_usage(self, capsys):
        assert main([]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert main(["entropy", "--config", "x", "--frobnicate"]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert main(["explode"]) == 1

    def test_missing_config_is_io_error(self, tmp_path, capsys):
        code = main(["entropy", "--config", str(tmp_path / "nope.cfg")])
        assert code == 2

    def test_bad_jobs_value(self, toy_project, capsys):
        assert main(["metrics", "--config", str(toy_project), "--jobs", "0"]) == 1


def _system_entropy(path):
    comment = path.read_text().splitlines()[0]
    return float(comment.rsplit("=", 1)[1])


class TestEntropyCommand:
    def test_toy_cochange_system_entropy(self, toy_project, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            ["entropy", "--config", str(toy_project), "--measure", "cochange",
             "--outdir", str(out)]
        )
        assert code == 0
        report = out / "toy" / "entropy" / "r1.cochange.csv"
        assert report.exists()
        assert _system_entropy(report) == pytest.approx(1.9056, abs=1e-3)

    def test_change_measure_written_too(self, toy_project, tmp_path):
        out = tmp_path / "out"
        assert main(["entropy", "--config", str(toy_project), "--outdir", str(out)]) == 0
        assert _system_entropy(
            out / "toy" / "entropy" / "r1.change.csv"
        ) == pytest.approx(1.6187, abs=1e-3)

    def test_rerun_is_byte_identical(self, toy_project, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            assert main(["entropy", "--config", str(toy_project), "--outdir", str(out)]) == 0
        for path_a in sorted((out_a / "toy" / "entropy").iterdir()):
            path_b = out_b / "toy" / "entropy" / path_a.name
            assert path_a.read_bytes() == path_b.read_bytes()


class TestDatasetCommand:
    def test_full_set_contains_both_entropy_columns(self, demo_project, tmp_path):
        out = tmp_path / "out"
        code = main(
            ["dataset", "--config", str(demo_project), "--set", "P+C+Co",
             "--outdir", str(out)]
        )
        assert code == 0
        for name in ("train.csv", "test.csv"):
            with open(out / "demo" / "P+C+Co" / name, newline="") as fh:
                header = next(csv.reader(fh))
            assert "sctr" in header and "cce" in header

    def test_substituted_set_drops_sctr(self, demo_project, tmp_path):
        out = tmp_path / "out"
        assert main(
            ["dataset", "--config", str(demo_project), "--set", "P+Co",
             "--outdir", str(out)]
        ) == 0
        for name in ("train.csv", "test.csv"):
            with open(out / "demo" / "P+Co" / name, newline="") as fh:
                header = next(csv.reader(fh))
            assert "sctr" not in header
            assert "cce" in header

    def test_dataset_without_labels_fails_cleanly(self, toy_project, tmp_path, capsys):
        code = main(["dataset", "--config", str(toy_project), "--outdir", str(tmp_path / "o")])
        assert code == 1
        assert "labels_path" in capsys.readouterr().err


class TestPipelineCommand:
    def test_full_pipeline_writes_all_stages(self, demo_project, tmp_path):
        out = tmp_path / "out"
        assert main(["pipeline", "--config", str(demo_project), "--outdir", str(out)]) == 0
        base = out / "demo"
        for expected in [
            "windows.csv", "windows/r1.log", "graph/r1.csv",
            "entropy/r1.change.csv", "entropy/r1.cochange.csv",
            "metrics.csv", "correlation.csv",
            "P+C/train.csv", "P+Co/train.csv", "P+C+Co/test.csv",
        ]:
            assert (base / expected).exists(), expected

    def test_parallel_jobs_match_serial(self, demo_project, tmp_path):
        serial, parallel = tmp_path / "s", tmp_path / "p"
        assert main(["metrics", "--config", str(demo_project), "--outdir", str(serial)]) == 0
        assert main(
            ["metrics", "--config", str(demo_project), "--outdir", str(parallel),
             "--jobs", "2"]
        ) == 0
        assert (serial / "demo" / "metrics.csv").read_bytes() == (
            parallel / "demo" / "metrics.csv"
        ).read_bytes()


def make_results_csv(path, seed=13):
    """Plausible classifier results: P+C+Co slightly ahead, with noise."""
    rng = np.random.default_rng(seed)
    classifiers = [
        "logistic-regression", "support-vector-machine", "random-forest",
        "xgboost-style-gradient-boosting", "gradient-boosting",
    ]
    offsets = {"P+C": 0.0, "P+Co": 0.01, "P+C+Co": 0.03}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["project", "classifier", "set_id", "auroc", "f1", "mcc", "precision", "recall"]
        )
        for project in ("projA", "projB"):
            for clf in classifiers:
                base = rng.uniform(0.55, 0.75, size=5)
                for set_id, offset in offsets.items():
                    vals = np.clip(base + offset + rng.normal(0, 0.004, size=5), 0, 1)
                    writer.writerow([project, clf, set_id] + [repr(float(v)) for v in vals])
    return path


class TestStatsCommand:
    def test_friedman_and_nemenyi_per_evaluation_metric(self, tmp_path):
        results = make_results_csv(tmp_path / "results.csv")
        out = tmp_path / "out"
        assert main(["stats", str(results), "--outdir", str(out)]) == 0
        with open(out / "significance.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        # three hypotheses per evaluation metric
        assert len(rows) == 15
        for metric in ("auroc", "f1", "mcc", "precision", "recall"):
            tests = [r["test"] for r in rows if r["metric"] == metric]
            assert tests == ["friedman", "nemenyi", "nemenyi"]

    def test_incomplete_results_rejected(self, tmp_path, capsys):
        results = tmp_path / "results.csv"
        results.write_text(
            "project,classifier,set_id,auroc,f1,mcc,precision,recall\n"
            "p,lr,P+C,0.7,0.6,0.3,0.6,0.6\n"
        )
        assert main(["stats", str(results), "--outdir", str(tmp_path / "o")]) == 1
        assert "metric sets" in capsys.readouterr().err
