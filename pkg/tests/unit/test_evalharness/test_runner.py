"""
Unit tests for fold planning and the experiment runner.
"""

import pytest

from hellogram.core.errors import InsufficientSplits, NoLabeledData
from hellogram.evalharness.folds import FoldPlan, prepare_split
from hellogram.evalharness.runner import (
    ExperimentConfig,
    ExperimentRunner,
    Method,
    ja3_classify,
    run_experiment,
    run_sweep,
)
from hellogram.features import ByteMode
from hellogram.ingest.corpus import repository_from_corpus
from hellogram.ingest.synthetic import split_corpus
from hellogram.ja3.repository import LabelRepository
from hellogram.pum.modelset import build_models
from hellogram.stunt.perturb import GreaseMode, PerturbationKind, PerturbationSpec
from hellogram.testing import TOOL_CIPHERS, hello_builder


@pytest.fixture
def splits(synthetic_corpus):
    """Four round-robin splits of the synthetic corpus, as raw hellos."""
    return [s.raws() for s in split_corpus(synthetic_corpus, 4)]


@pytest.fixture
def repo(synthetic_corpus):
    return repository_from_corpus(synthetic_corpus)


@pytest.fixture
def runner(splits, repo):
    return ExperimentRunner.from_splits(splits, repo)


ORDERED = PerturbationSpec(kind=PerturbationKind.ORDERED, rng_seed=5)


class TestFoldPlan:
    """Test FoldPlan and prepare_split()."""

    def test_needs_two_splits(self, splits, repo):
        """Test InsufficientSplits."""
        with pytest.raises(InsufficientSplits):
            FoldPlan.from_splits(splits[:1], repo)

    def test_unknown_samples_dropped(self, splits):
        """Test that an empty repository leaves nothing to evaluate."""
        assert prepare_split(splits[0], LabelRepository()) == []

    def test_each_split_validates_once(self, splits, repo):
        """Test k folds with disjoint validation bytes in training."""
        plan = FoldPlan.from_splits(splits, repo)

        folds = list(plan.folds())

        assert [f.index for f in folds] == [0, 1, 2, 3]
        for fold in folds:
            held_out = {s.key for s in fold.validation}
            assert all(s.key not in held_out for s in fold.training)
            assert fold.validation == plan.splits[fold.index]

    def test_duplicates_collapse(self, splits, repo):
        """Test that a split listed twice keeps unique samples only."""
        doubled = prepare_split(list(splits[0]) + list(splits[0]), repo)

        assert len(doubled) == len(prepare_split(splits[0], repo))


class TestExperimentRunner:
    """Test ExperimentRunner.run()."""

    def test_ja3_perfect_without_perturbation(self, runner):
        """Test that JA3 recovers every label of its own repository."""
        report = runner.run(ExperimentConfig(method=Method.JA3))

        assert report.unbiased_f1_mean == 1.0
        assert len(report.trials) == 4

    def test_ja3_collapses_under_ordered_swap(self, runner):
        """Test that one swapped pair defeats every exact hash match."""
        report = runner.run(ExperimentConfig(method=Method.JA3, perturbation=ORDERED))

        assert report.unbiased_f1_mean == 0.0

    def test_ml_classifies_clean_traffic(self, runner):
        """Test that positional models separate the synthetic classes."""
        report = runner.run(ExperimentConfig(method=Method.ML))

        assert report.unbiased_f1_mean > 0.9
        assert set(report.per_class_f1) == {"chrome-00", "firefox-01", "safari-02", "edge-03"}

    def test_hybrid_not_worse_than_ja3_under_swap(self, runner):
        """Test that the ML fallback rescues Unknown hashes."""
        ja3 = runner.run(ExperimentConfig(method=Method.JA3, perturbation=ORDERED))
        hybrid = runner.run(ExperimentConfig(method=Method.HYBRID, perturbation=ORDERED))

        assert hybrid.unbiased_f1_mean > ja3.unbiased_f1_mean

    def test_trials_replay_identically(self, runner):
        """Test seeded reproducibility of perturbed trials."""
        config = ExperimentConfig(
            perturbation=PerturbationSpec(kind=PerturbationKind.FRACTION, fraction=0.5, rng_seed=9),
            trials=3,
        )

        first = runner.run(config)
        second = runner.run(config)

        assert [t.unbiased_f1 for t in first.trials] == [t.unbiased_f1 for t in second.trials]

    def test_parallel_matches_serial(self, runner):
        """Test that worker count does not change results or order."""
        config = ExperimentConfig(perturbation=ORDERED, trials=3)

        serial = runner.run(config)
        parallel = runner.run(config.model_copy(update={"jobs": 4}))

        assert [(t.fold, t.trial, t.unbiased_f1) for t in serial.trials] == [
            (t.fold, t.trial, t.unbiased_f1) for t in parallel.trials
        ]

    def test_unperturbed_trials_are_identical(self, runner):
        """Test that repeated clean trials have zero spread."""
        report = runner.run(ExperimentConfig(trials=3))

        assert len(report.trials) == 12
        for fold, mean in report.fold_means.items():
            assert all(t.unbiased_f1 == mean for t in report.trials if t.fold == fold)

    def test_models_cached_per_fold(self, runner, mocker):
        """Test that sweeping perturbations trains each fold once per byte mode."""
        spy = mocker.patch("hellogram.evalharness.runner.build_models", wraps=build_models)

        runner.run(ExperimentConfig(perturbation=ORDERED))
        runner.run(ExperimentConfig(perturbation=PerturbationSpec(kind="fraction", fraction=0.3)))
        runner.run(ExperimentConfig(byte_mode=ByteMode.JA3))

        assert spy.call_count == 4 + 4

    def test_grease_mode_recorded(self, runner):
        """Test that ordered configs report their GREASE mode."""
        spec = PerturbationSpec(kind=PerturbationKind.ORDERED, grease_mode=GreaseMode.EXCLUDE)

        report = runner.run(ExperimentConfig(method=Method.JA3, perturbation=spec))

        assert all(t.grease_mode == GreaseMode.EXCLUDE for t in report.trials)
        assert all(t.kind == "ordered" for t in report.trials)

    def test_keyword_means(self, runner):
        """Test keyword super-set aggregation."""
        report = runner.run(ExperimentConfig(method=Method.JA3, keywords=["CHROME", "nothing"]))

        assert report.keyword_f1 == {"CHROME": 1.0}

    def test_no_labeled_data(self, splits):
        """Test NoLabeledData when the repository knows no hash."""
        with pytest.raises(NoLabeledData):
            run_experiment(splits, ExperimentConfig(), LabelRepository())


class TestJa3Classify:
    """Test ja3_classify()."""

    def test_known_hash(self, two_class_repository):
        """Test that the SNI host does not affect the label."""
        parsed = hello_builder(TOOL_CIPHERS, host="elsewhere.test").build()

        assert ja3_classify(parsed, two_class_repository) == "tool"

    def test_reordered_ciphers_are_unknown(self, two_class_repository):
        """Test that a reordered cipher list misses the repository."""
        parsed = hello_builder(list(reversed(TOOL_CIPHERS))).build()

        assert ja3_classify(parsed, two_class_repository) == "Unknown"


class TestRunSweep:
    """Test run_sweep()."""

    def test_one_report_per_method_and_fraction(self, splits, repo):
        """Test sweep shape and ordering."""
        reports = run_sweep(splits, ExperimentConfig(), [0.2, 1.0], [Method.JA3, Method.ML], repo, rng_seed=1)

        assert [(r.config.method, r.config.fraction) for r in reports] == [
            (Method.JA3, 0.2),
            (Method.JA3, 1.0),
            (Method.ML, 0.2),
            (Method.ML, 1.0),
        ]
        assert reports[0].unbiased_f1_mean == 0.0
