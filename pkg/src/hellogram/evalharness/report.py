"""
Corpus accounting and CSV result writers.

Every CSV starts with a header row. Floats are rendered with fixed precision
through str.format, so the decimal separator is always '.'.
"""

import csv
import logging
from typing import Any, Iterable, List, Optional, Sequence, Set, TextIO, Tuple

from pydantic import BaseModel

from hellogram.core.errors import ParseError
from hellogram.evalharness.runner import EvalReport
from hellogram.ja3.fingerprint import UNKNOWN_LABEL
from hellogram.ja3.repository import LabelRepository
from hellogram.wire.clienthello import RawClientHello, parse_client_hello
from hellogram.wire.scrub import scrub

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = [
    "fold",
    "trial",
    "method",
    "byte_mode",
    "kind",
    "fraction",
    "grease_mode",
    "unbiased_f1",
    "n_scored",
    "n_unperturbable",
]
SUMMARY_COLUMNS = [
    "method",
    "byte_mode",
    "kind",
    "fraction",
    "grease_mode",
    "trials",
    "unbiased_f1_mean",
    "ci_halfwidth",
    "ci_low",
    "ci_high",
]
CLASS_COLUMNS = ["method", "byte_mode", "kind", "fraction", "class", "f1"]
KEYWORD_COLUMNS = ["method", "byte_mode", "kind", "fraction", "keyword", "f1_mean"]
CORPUS_COLUMNS = ["split", "total", "without_unknown", "unique"]


class SplitAccounting(BaseModel):
    split: str
    total: int
    without_unknown: int
    unique: int


def corpus_report(
    splits: Sequence[Sequence[RawClientHello]],
    repo: LabelRepository,
    names: Optional[Sequence[str]] = None,
) -> List[SplitAccounting]:
    """Count hellos per split: all, with a known label, and unique.

    Uniqueness is judged on (label, scrubbed bytes), so duplicates collapse only
    in the ``unique`` column. Unparseable hellos count toward ``total`` only.
    """
    rows = []
    for index, split in enumerate(splits):
        known = 0
        unique: Set[Tuple[str, bytes]] = set()
        for raw in split:
            try:
                parsed = parse_client_hello(raw)
            except ParseError:
                continue
            app_label = repo.label_for(parsed)
            if app_label == UNKNOWN_LABEL:
                continue
            known += 1
            unique.add((app_label, scrub(parsed).data))
        name = names[index] if names is not None else f"split_{index:02d}"
        rows.append(SplitAccounting(split=name, total=len(split), without_unknown=known, unique=len(unique)))
    return rows


def _f(value: Optional[float]) -> str:
    return "" if value is None else "{:.6f}".format(value)


def _fraction(value: Optional[float]) -> str:
    return "" if value is None else "{:.2f}".format(value)


def _writer(handle: TextIO, columns: List[str]) -> Any:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    return writer


def _config_cells(report: EvalReport) -> List[Any]:
    config = report.config
    return [config.method.value, config.byte_mode.value, config.kind, _fraction(config.fraction)]


def write_trials_csv(reports: Iterable[EvalReport], handle: TextIO) -> None:
    """One row per (configuration, fold, trial)."""
    writer = _writer(handle, TRIAL_COLUMNS)
    for report in reports:
        for record in report.trials:
            writer.writerow(
                [
                    record.fold,
                    record.trial,
                    record.method.value,
                    record.byte_mode.value,
                    record.kind,
                    _fraction(record.fraction),
                    record.grease_mode.value if record.grease_mode else "",
                    _f(record.unbiased_f1),
                    record.n_scored,
                    record.n_unperturbable,
                ]
            )


def write_summary_csv(reports: Iterable[EvalReport], handle: TextIO) -> None:
    """One row per configuration: mean unbiased f1 with its confidence interval."""
    writer = _writer(handle, SUMMARY_COLUMNS)
    for report in reports:
        grease = report.config.grease_mode
        writer.writerow(
            _config_cells(report)
            + [
                grease.value if grease else "",
                len(report.trials),
                _f(report.unbiased_f1_mean),
                _f(report.ci_halfwidth),
                _f(report.ci_low),
                _f(report.ci_high),
            ]
        )


def write_class_csv(reports: Iterable[EvalReport], handle: TextIO) -> None:
    """Mean per-class f1 of every configuration."""
    writer = _writer(handle, CLASS_COLUMNS)
    for report in reports:
        for cls, score in report.per_class_f1.items():
            writer.writerow(_config_cells(report) + [cls, _f(score)])


def write_keyword_csv(reports: Iterable[EvalReport], handle: TextIO) -> None:
    """Keyword super-set means (classes whose label contains the keyword)."""
    writer = _writer(handle, KEYWORD_COLUMNS)
    for report in reports:
        for keyword, score in report.keyword_f1.items():
            writer.writerow(_config_cells(report) + [keyword, _f(score)])


def write_corpus_report_csv(rows: Iterable[SplitAccounting], handle: TextIO) -> None:
    writer = _writer(handle, CORPUS_COLUMNS)
    for row in rows:
        writer.writerow([row.split, row.total, row.without_unknown, row.unique])
