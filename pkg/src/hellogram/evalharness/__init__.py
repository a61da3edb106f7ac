"""
Evaluation harness: k-fold cross-validation, perturbation trials, unbiased f1.
"""

from hellogram.evalharness.folds import Fold, FoldPlan, LabeledSample, prepare_split
from hellogram.evalharness.metrics import (
    f1_per_class,
    keyword_mean,
    mean_confidence_interval,
    per_class_f1,
    precision_recall,
    unbiased_f1,
)
from hellogram.evalharness.report import (
    SplitAccounting,
    corpus_report,
    write_class_csv,
    write_corpus_report_csv,
    write_keyword_csv,
    write_summary_csv,
    write_trials_csv,
)
from hellogram.evalharness.runner import (
    EvalReport,
    ExperimentConfig,
    ExperimentRunner,
    Method,
    TrialRecord,
    ja3_classify,
    run_experiment,
    run_sweep,
    summarize,
)
from hellogram.ja3.fingerprint import extract_ja3_bytes

__all__ = [
    "Fold",
    "FoldPlan",
    "LabeledSample",
    "prepare_split",
    "f1_per_class",
    "keyword_mean",
    "mean_confidence_interval",
    "per_class_f1",
    "precision_recall",
    "unbiased_f1",
    "SplitAccounting",
    "corpus_report",
    "write_class_csv",
    "write_corpus_report_csv",
    "write_keyword_csv",
    "write_summary_csv",
    "write_trials_csv",
    "EvalReport",
    "ExperimentConfig",
    "ExperimentRunner",
    "Method",
    "TrialRecord",
    "ja3_classify",
    "run_experiment",
    "run_sweep",
    "summarize",
    "extract_ja3_bytes",
]
