"""
Integration tests for the hellogram command line.

Each test drives the click group through CliRunner against files in tmp_path.
Payloads are read from stdout and diagnostics from stderr.
"""

import csv
import importlib
import io
import json
import logging

import pytest
from click.testing import CliRunner

from hellogram.cli.main import cli
from hellogram.infer import PredictionFailure
from hellogram.ingest.hexline import read_hexline
from hellogram.testing import make_raw, tcp_frame, write_pcap


def csv_rows(text: str):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def runner(hellogram_env):
    return CliRunner()


@pytest.fixture
def workspace(runner, tmp_path):
    """A generated corpus: corpus.hexline, splits/ and repository.tsv."""
    out_dir = tmp_path / "gen"
    result = runner.invoke(
        cli,
        [
            "generate", "--classes", "3", "--total", "60", "--splits", "3",
            "--seed", "1", "--imbalance", "uniform", "--out-dir", str(out_dir),
        ],
    )
    assert result.exit_code == 0, result.stderr
    return out_dir


@pytest.fixture
def model_file(runner, workspace):
    path = workspace / "model.json"
    result = runner.invoke(cli, ["train", "--in", str(workspace / "corpus.hexline"), "--out", str(path)])
    assert result.exit_code == 0, result.stderr
    return path


class TestGenerate:
    """Test the generate command."""

    def test_writes_corpus_splits_and_repository(self, workspace):
        """Test the output layout."""
        assert len(read_hexline(workspace / "corpus.hexline")) == 60
        assert sorted(p.name for p in (workspace / "splits").iterdir()) == [
            "split_00.hexline",
            "split_01.hexline",
            "split_02.hexline",
        ]
        lines = [l for l in (workspace / "repository.tsv").read_text().splitlines() if not l.startswith("#")]
        assert len(lines) == 3


class TestConvertAndLabel:
    """Test convert and label."""

    def test_convert_pcap(self, runner, tmp_path):
        """Test pcap to hex-line conversion with skip counts on stderr."""
        hello = make_raw()
        pcap = write_pcap(tmp_path / "cap.pcap", [tcp_frame(hello.data), tcp_frame(hello.data[:50])])
        out = tmp_path / "out.hexline"

        result = runner.invoke(cli, ["convert", "--in", str(pcap), "--out", str(out)])

        assert result.exit_code == 0
        assert result.stdout == ""
        assert "skipped 1" in result.stderr
        assert [e.raw.data for e in read_hexline(out).entries] == [hello.data]

    def test_convert_bad_pcap(self, runner, tmp_path):
        """Test exit 1 naming the file."""
        bad = tmp_path / "broken.pcap"
        bad.write_bytes(b"definitely not a capture")

        result = runner.invoke(cli, ["convert", "--in", str(bad), "--out", str(tmp_path / "o.hexline")])

        assert result.exit_code == 1
        assert "broken.pcap" in result.stderr
        assert "NOT_PCAP" in result.stderr

    def test_convert_non_utf8_hexline(self, runner, tmp_path):
        """Test exit 1 with a diagnostic naming a hex-line file that is not UTF-8."""
        bad = tmp_path / "bad.hexline"
        bad.write_bytes(b"\xff\xfe\x00\x16\x03\x01")

        result = runner.invoke(cli, ["convert", "--in", str(bad), "--out", str(tmp_path / "o.hexline")])

        assert result.exit_code == 1
        assert "NOT_TEXT" in result.stderr
        assert "bad.hexline" in result.stderr
        assert not (tmp_path / "o.hexline").exists()

    def test_error_details_logged_at_debug(self, runner, tmp_path, caplog):
        """Test that --log-level DEBUG records the structured error payload."""
        bad = tmp_path / "broken.pcap"
        bad.write_bytes(b"definitely not a capture")
        caplog.set_level(logging.DEBUG, logger="hellogram.cli.outcome")

        result = runner.invoke(
            cli, ["--log-level", "DEBUG", "convert", "--in", str(bad), "--out", str(tmp_path / "o.hexline")]
        )

        assert result.exit_code == 1
        assert "'code': 'NOT_PCAP'" in caplog.text
        assert str(bad) in caplog.text

    def test_label_marks_unknown(self, runner, workspace, tmp_path):
        """Test repository labels and the Unknown share."""
        unknown = make_raw([0x1301, 0x1302])
        source = tmp_path / "in.hexline"
        source.write_text((workspace / "corpus.hexline").read_text() + unknown.hex() + "\n")
        out = tmp_path / "labeled.hexline"

        result = runner.invoke(
            cli, ["label", "--in", str(source), "--repo", str(workspace / "repository.tsv"), "--out", str(out)]
        )

        assert result.exit_code == 0
        labels = read_hexline(out).labels()
        assert labels[-1] == "Unknown"
        assert labels[:-1] == read_hexline(workspace / "corpus.hexline").labels()
        assert "1 Unknown" in result.stderr


class TestTrainPredict:
    """Test train, predict, update and inspect."""

    def test_train_summary(self, runner, workspace, tmp_path):
        """Test the per-label summary on stdout."""
        result = runner.invoke(
            cli, ["train", "--in", str(workspace / "corpus.hexline"), "--out", str(tmp_path / "m.json")]
        )

        assert result.exit_code == 0
        rows = csv_rows(result.stdout)
        assert rows[0] == ["label", "m", "n_sequences"]
        assert len(rows) == 4
        assert json.loads((tmp_path / "m.json").read_text())["format"] == "hellogram-model"

    def test_predict_recovers_training_labels(self, runner, workspace, model_file):
        """Test that training hellos are classified as their own class."""
        corpus = read_hexline(workspace / "corpus.hexline")

        result = runner.invoke(cli, ["predict", "--model", str(model_file), "--in", str(workspace / "corpus.hexline")])

        assert result.exit_code == 0
        rows = csv_rows(result.stdout)
        assert rows[0] == ["source_id", "label", "score"]
        predicted = [row[1] for row in rows[1:]]
        hits = sum(p == t for p, t in zip(predicted, corpus.labels()))
        assert hits / len(predicted) >= 0.95

    def test_predict_scores_columns(self, runner, workspace, model_file):
        """Test one score column per model label."""
        result = runner.invoke(
            cli, ["predict", "--model", str(model_file), "--in", str(workspace / "corpus.hexline"), "--scores"]
        )

        header = csv_rows(result.stdout)[0]
        assert len(header) == 3 + 3
        assert all(name.startswith("score:") for name in header[3:])

    def test_predict_failure_row_matches_header(self, runner, workspace, model_file, mocker):
        """Test that an unclassifiable hello still fills every column."""
        failure = PredictionFailure(index=0, code="EMPTY_INPUT", message="empty", source_id="x:1")
        mocker.patch.object(
            importlib.import_module("hellogram.cli.main"),
            "predict_batch",
            side_effect=lambda models, features, with_scores: [failure] * len(features),
        )

        result = runner.invoke(
            cli, ["predict", "--model", str(model_file), "--in", str(workspace / "corpus.hexline"), "--scores"]
        )

        assert result.exit_code == 0, result.stderr
        rows = csv_rows(result.stdout)
        assert len(rows) == 61
        assert all(len(row) == len(rows[0]) for row in rows[1:])
        assert rows[1][:2] == ["x:1", ""]
        assert "60 failed" in result.stderr

    def test_predict_hybrid_method_column(self, runner, workspace, model_file):
        """Test that known hashes are answered by JA3."""
        result = runner.invoke(
            cli,
            [
                "predict", "--model", str(model_file), "--in", str(workspace / "corpus.hexline"),
                "--repo", str(workspace / "repository.tsv"),
            ],
        )

        rows = csv_rows(result.stdout)
        assert rows[0] == ["source_id", "label", "score", "method"]
        assert {row[3] for row in rows[1:]} == {"ja3"}

    def test_predict_min_score(self, runner, workspace, model_file):
        """Test that a threshold above every score yields Unknown."""
        result = runner.invoke(
            cli,
            ["predict", "--model", str(model_file), "--in", str(workspace / "corpus.hexline"), "--min-score", "0"],
        )

        assert {row[1] for row in csv_rows(result.stdout)[1:]} == {"Unknown"}

    def test_predict_empty_input(self, runner, model_file, tmp_path):
        """Test header-only output for an empty file."""
        empty = tmp_path / "empty.hexline"
        empty.write_text("")

        result = runner.invoke(cli, ["predict", "--model", str(model_file), "--in", str(empty)])

        assert result.exit_code == 0
        assert result.stdout == "source_id,label,score\n"

    def test_predict_corrupt_model(self, runner, workspace, tmp_path):
        """Test exit 1 for a damaged model file."""
        bad = tmp_path / "bad.json"
        bad.write_text("{")

        result = runner.invoke(cli, ["predict", "--model", str(bad), "--in", str(workspace / "corpus.hexline")])

        assert result.exit_code == 1
        assert "CORRUPT_MODEL_FILE" in result.stderr
        assert result.stdout == ""

    def test_update_reports_added_and_skipped(self, runner, workspace, model_file):
        """Test that re-absorbing the training corpus only skips."""
        result = runner.invoke(
            cli,
            [
                "update", "--model", str(model_file), "--in", str(workspace / "corpus.hexline"),
                "--repo", str(workspace / "repository.tsv"),
            ],
        )

        assert result.exit_code == 0
        rows = csv_rows(result.stdout)
        assert rows[0] == ["label", "added", "skipped"]
        assert all(row[1] == "0" for row in rows[1:])
        assert sum(int(row[2]) for row in rows[1:]) == 60

    def test_update_init_creates_model(self, runner, workspace, tmp_path):
        """Test --init on a missing model file."""
        path = tmp_path / "fresh.json"

        result = runner.invoke(
            cli,
            [
                "update", "--model", str(path), "--init", "--in", str(workspace / "corpus.hexline"),
                "--repo", str(workspace / "repository.tsv"),
            ],
        )

        assert result.exit_code == 0
        assert len(json.loads(path.read_text())["models"]) == 3

    def test_update_init_matches_train(self, runner, workspace, model_file, tmp_path):
        """Test that absorbing the corpus from scratch writes the same model file as train."""
        path = tmp_path / "online.json"

        result = runner.invoke(
            cli,
            [
                "update", "--model", str(path), "--init", "--in", str(workspace / "corpus.hexline"),
                "--repo", str(workspace / "repository.tsv"),
            ],
        )

        assert result.exit_code == 0, result.stderr
        assert path.read_bytes() == model_file.read_bytes()

    def test_inspect(self, runner, model_file):
        """Test the summary and one label's probability matrix."""
        summary = runner.invoke(cli, ["inspect", "--model", str(model_file)])
        label = csv_rows(summary.stdout)[1][0]

        matrix = runner.invoke(cli, ["inspect", "--model", str(model_file), "--label", label])

        rows = csv_rows(matrix.stdout)
        assert len(rows[0]) == 257
        assert abs(sum(float(v) for v in rows[1][1:]) - 1.0) < 1e-5


class TestStunt:
    """Test the stunt command."""

    def test_ordered_swap_changes_every_hello(self, runner, workspace, tmp_path):
        """Test that every cipher list changes and the count is kept."""
        out = tmp_path / "stunted.hexline"

        result = runner.invoke(
            cli, ["stunt", "--in", str(workspace / "corpus.hexline"), "--kind", "ordered", "--out", str(out)]
        )

        assert result.exit_code == 0
        before = read_hexline(workspace / "corpus.hexline")
        after = read_hexline(out)
        assert len(after) == len(before)
        assert all(a.raw.data != b.raw.data for a, b in zip(after.entries, before.entries))
        assert after.labels() == before.labels()

    def test_fraction_requires_fraction(self, runner, workspace, tmp_path):
        """Test a usage error for --kind fraction without --fraction."""
        result = runner.invoke(
            cli,
            ["stunt", "--in", str(workspace / "corpus.hexline"), "--kind", "fraction", "--out", str(tmp_path / "o")],
        )

        assert result.exit_code == 2


class TestExperiment:
    """Test the experiment and report commands."""

    def test_ja3_clean_and_swapped(self, runner, workspace, tmp_path):
        """Test result files for a clean and a stunted JA3 run."""
        out = tmp_path / "ja3.csv"

        clean = runner.invoke(
            cli, ["experiment", "--splits", str(workspace / "splits"), "--method", "ja3", "--out", str(out)]
        )

        assert clean.exit_code == 0, clean.stderr
        summary = csv_rows((tmp_path / "ja3.summary.csv").read_text())
        assert dict(zip(summary[0], summary[1]))["unbiased_f1_mean"] == "1.000000"
        assert (tmp_path / "ja3.classes.csv").exists()
        assert not (tmp_path / "ja3.keywords.csv").exists()

        swapped = runner.invoke(
            cli,
            [
                "experiment", "--splits", str(workspace / "splits"), "--method", "ja3",
                "--kind", "ordered", "--trials", "2", "--out", str(out),
            ],
        )

        assert swapped.exit_code == 0
        summary = csv_rows((tmp_path / "ja3.summary.csv").read_text())
        assert dict(zip(summary[0], summary[1]))["unbiased_f1_mean"] == "0.000000"
        assert len(csv_rows(out.read_text())) == 1 + 3 * 2

    def test_fraction_sweep_rows(self, runner, workspace, tmp_path):
        """Test one summary row per method and fraction."""
        out = tmp_path / "sweep.csv"

        result = runner.invoke(
            cli,
            [
                "experiment", "--splits", str(workspace / "splits"), "--method", "ml", "--method", "hybrid",
                "--kind", "fraction", "--fractions", "0.5,1.0", "--keyword", "chrome", "--out", str(out),
            ],
        )

        assert result.exit_code == 0, result.stderr
        summary = csv_rows((tmp_path / "sweep.summary.csv").read_text())
        assert [(row[0], row[3]) for row in summary[1:]] == [
            ("ml", "0.50"), ("ml", "1.00"), ("hybrid", "0.50"), ("hybrid", "1.00"),
        ]
        assert (tmp_path / "sweep.keywords.csv").exists()

    def test_report(self, runner, workspace):
        """Test the per-split accounting CSV."""
        result = runner.invoke(cli, ["report", "--splits", str(workspace / "splits")])

        rows = csv_rows(result.stdout)
        assert rows[0] == ["split", "total", "without_unknown", "unique"]
        assert [row[0] for row in rows[1:]] == ["split_00", "split_01", "split_02"]
        assert sum(int(row[1]) for row in rows[1:]) == 60


class TestUsage:
    """Test exit codes for usage and environment errors."""

    def test_missing_option(self, runner):
        """Test exit 2 for a missing required option."""
        assert runner.invoke(cli, ["train"]).exit_code == 2

    def test_delta_out_of_range(self, runner, workspace, tmp_path):
        """Test exit 2 for delta outside (0, 1)."""
        result = runner.invoke(
            cli,
            ["train", "--in", str(workspace / "corpus.hexline"), "--delta", "1.0", "--out", str(tmp_path / "m")],
        )

        assert result.exit_code == 2

    def test_invalid_environment(self, runner, monkeypatch):
        """Test exit 2 for an invalid HELLOGRAM_* value."""
        monkeypatch.setenv("HELLOGRAM_DELTA", "7")

        result = runner.invoke(cli, ["inspect", "--model", "x"])

        assert result.exit_code == 2

    def test_version(self, runner):
        """Test --version."""
        result = runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert "0.1.0" in result.stdout
