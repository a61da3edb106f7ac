"""
Experiment runner: k-fold cross-validation with perturbation trials.

For every fold the runner trains one ModelSet on the training splits, then runs
the configured number of trials. A trial perturbs each validation hello with
its own seeded generator, re-serializes and re-parses it, classifies it with
the configured method and scores the unbiased f1 over the classes present in
the validation truth. Trials are independent and may run on a thread pool;
results are always ordered by (fold, trial).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from hellogram.core.config import DEFAULT_CONFIDENCE, DEFAULT_DELTA
from hellogram.core.errors import ListTooShort, NoLabeledData
from hellogram.evalharness.folds import Fold, FoldPlan
from hellogram.evalharness.metrics import keyword_mean, mean_confidence_interval, per_class_f1
from hellogram.features import ByteMode, featurize
from hellogram.infer.predictor import predict
from hellogram.ja3.fingerprint import UNKNOWN_LABEL
from hellogram.ja3.repository import LabelRepository
from hellogram.pum.modelset import ModelSet, build_models
from hellogram.stunt.perturb import (
    GreaseMode,
    PerturbationKind,
    PerturbationSpec,
    make_rng,
    perturb,
    reserialize,
)
from hellogram.wire.clienthello import ParsedClientHello, RawClientHello, parse_client_hello

logger = logging.getLogger(__name__)

_Task = Tuple[Fold, int, Optional[ModelSet]]


class Method(str, Enum):
    """Classifier under evaluation."""

    JA3 = "ja3"
    ML = "ml"
    HYBRID = "hybrid"  # JA3 lookup, maximum likelihood when the hash is unknown


class ExperimentConfig(BaseModel):
    method: Method = Method.ML
    byte_mode: ByteMode = ByteMode.ALL
    perturbation: Optional[PerturbationSpec] = None
    trials: int = Field(default=1, ge=1)
    confidence: float = Field(default=DEFAULT_CONFIDENCE, gt=0.0, lt=1.0)
    delta: float = Field(default=DEFAULT_DELTA, gt=0.0, lt=1.0)
    jobs: int = Field(default=1, ge=1, description="Worker threads for trials")
    keywords: List[str] = Field(default_factory=list)

    @property
    def kind(self) -> str:
        return "none" if self.perturbation is None else self.perturbation.kind.value

    @property
    def fraction(self) -> Optional[float]:
        return None if self.perturbation is None else self.perturbation.fraction

    @property
    def grease_mode(self) -> Optional[GreaseMode]:
        if self.perturbation is None or self.perturbation.kind != PerturbationKind.ORDERED:
            return None
        return self.perturbation.grease_mode

    @property
    def needs_models(self) -> bool:
        return self.method in (Method.ML, Method.HYBRID)


class TrialRecord(BaseModel):
    """Score of one (fold, trial) pair."""

    fold: int
    trial: int
    method: Method
    byte_mode: ByteMode
    kind: str
    fraction: Optional[float] = None
    grease_mode: Optional[GreaseMode] = None
    unbiased_f1: float = Field(..., ge=0.0, le=1.0)
    n_scored: int
    n_unperturbable: int = 0
    per_class_f1: Dict[str, float] = Field(default_factory=dict)


class EvalReport(BaseModel):
    """Aggregate of every trial of one configuration."""

    config: ExperimentConfig
    unbiased_f1_mean: float = Field(..., ge=0.0, le=1.0)
    ci_halfwidth: float = Field(..., ge=0.0)
    per_class_f1: Dict[str, float] = Field(default_factory=dict)
    fold_means: Dict[int, float] = Field(default_factory=dict)
    keyword_f1: Dict[str, float] = Field(default_factory=dict)
    trials: List[TrialRecord] = Field(default_factory=list)

    @property
    def ci_low(self) -> float:
        return self.unbiased_f1_mean - self.ci_halfwidth

    @property
    def ci_high(self) -> float:
        return self.unbiased_f1_mean + self.ci_halfwidth


def ja3_classify(parsed: ParsedClientHello, repo: LabelRepository) -> str:
    """Repository label of the hello's JA3 hash, or "Unknown"."""
    return repo.label_for(parsed)


class ExperimentRunner:
    """Runs configurations over one fold plan, caching trained models.

    Models depend only on (fold, byte mode, delta), so sweeping fractions or
    methods trains each fold once.
    """

    def __init__(self, plan: FoldPlan, repo: LabelRepository):
        if plan.n_samples == 0:
            raise NoLabeledData("no split holds a hello with a known JA3 label")
        self.plan = plan
        self.repo = repo
        self._folds: List[Fold] = list(plan.folds())
        self._models: Dict[Tuple[int, ByteMode, float], ModelSet] = {}

    @classmethod
    def from_splits(
        cls, splits: Sequence[Sequence[RawClientHello]], repo: LabelRepository
    ) -> "ExperimentRunner":
        return cls(FoldPlan.from_splits(splits, repo), repo)

    def models_for(self, fold: Fold, byte_mode: ByteMode, delta: float) -> ModelSet:
        key = (fold.index, byte_mode, delta)
        cached = self._models.get(key)
        if cached is not None:
            return cached
        if not fold.training:
            raise NoLabeledData(f"fold {fold.index} has no labeled training data", details={"fold": fold.index})
        corpus = [featurize(s.parsed, byte_mode, label=s.truth, source_id=s.source_id) for s in fold.training]
        models = build_models(corpus, delta=delta, byte_mode=byte_mode)
        self._models[key] = models
        logger.info(f"[Experiment] Fold {fold.index}: trained {len(models)} models on {len(corpus)} samples")
        return models

    def _classify(self, parsed: ParsedClientHello, config: ExperimentConfig, models: Optional[ModelSet]) -> str:
        if config.method != Method.ML:
            app_label = ja3_classify(parsed, self.repo)
            if config.method == Method.JA3 or app_label != UNKNOWN_LABEL:
                return app_label
        assert models is not None
        return predict(models, featurize(parsed, config.byte_mode)).label

    def _run_trial(
        self, fold: Fold, trial: int, config: ExperimentConfig, models: Optional[ModelSet]
    ) -> Optional[TrialRecord]:
        spec = config.perturbation
        rng = make_rng(spec.rng_seed, fold.index, trial) if spec is not None else None
        truth: List[str] = []
        pred: List[str] = []
        unperturbable = 0

        for sample in fold.validation:
            parsed = sample.parsed
            if spec is not None:
                assert rng is not None
                try:
                    perturbed = perturb(parsed, spec, rng)
                except ListTooShort:
                    unperturbable += 1
                    continue
                # Perturbed hellos travel as bytes, as they would on the wire.
                parsed = parse_client_hello(reserialize(perturbed, source_id=sample.source_id))
            truth.append(sample.truth)
            pred.append(self._classify(parsed, config, models))

        if not truth:
            logger.warning(f"[Experiment] Fold {fold.index} trial {trial}: nothing to score")
            return None

        scores = per_class_f1(truth, pred, set(truth))
        return TrialRecord(
            fold=fold.index,
            trial=trial,
            method=config.method,
            byte_mode=config.byte_mode,
            kind=config.kind,
            fraction=config.fraction,
            grease_mode=config.grease_mode,
            unbiased_f1=sum(scores.values()) / len(scores),
            n_scored=len(truth),
            n_unperturbable=unperturbable,
            per_class_f1=scores,
        )

    def run(self, config: ExperimentConfig) -> EvalReport:
        """Run every fold and trial of one configuration.

        Raises:
            NoLabeledData: A fold has no training data, or no trial could be scored.
        """
        tasks: List[_Task] = []
        for fold in self._folds:
            if not fold.validation:
                logger.warning(f"[Experiment] Fold {fold.index}: empty validation split, skipped")
                continue
            models = self.models_for(fold, config.byte_mode, config.delta) if config.needs_models else None
            tasks.extend((fold, trial, models) for trial in range(config.trials))

        records = self._execute(tasks, config)
        if not records:
            raise NoLabeledData("no trial produced a score")
        return summarize(config, records)

    def _execute(self, tasks: List[_Task], config: ExperimentConfig) -> List[TrialRecord]:
        if config.perturbation is None:
            # Without perturbation every trial of a fold predicts identically.
            first: Dict[int, Optional[TrialRecord]] = {}
            results = []
            for fold, trial, models in tasks:
                if fold.index not in first:
                    first[fold.index] = self._run_trial(fold, 0, config, models)
                base = first[fold.index]
                if base is not None:
                    results.append(base.model_copy(update={"trial": trial}))
            return results

        if config.jobs > 1:
            with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                futures = [pool.submit(self._run_trial, fold, trial, config, models) for fold, trial, models in tasks]
                outcomes = [future.result() for future in futures]
        else:
            outcomes = [self._run_trial(fold, trial, config, models) for fold, trial, models in tasks]

        records = [record for record in outcomes if record is not None]
        records.sort(key=lambda r: (r.fold, r.trial))
        return records


def summarize(config: ExperimentConfig, records: List[TrialRecord]) -> EvalReport:
    """Aggregate trial records into an EvalReport."""
    mean, halfwidth = mean_confidence_interval([r.unbiased_f1 for r in records], config.confidence)

    class_scores: Dict[str, List[float]] = {}
    fold_scores: Dict[int, List[float]] = {}
    for record in records:
        fold_scores.setdefault(record.fold, []).append(record.unbiased_f1)
        for cls, score in record.per_class_f1.items():
            class_scores.setdefault(cls, []).append(score)

    per_class = {cls: sum(v) / len(v) for cls, v in sorted(class_scores.items())}
    keywords = {}
    for keyword in config.keywords:
        value = keyword_mean(per_class, keyword)
        if value is not None:
            keywords[keyword] = value

    report = EvalReport(
        config=config,
        unbiased_f1_mean=min(1.0, max(0.0, mean)),
        ci_halfwidth=halfwidth,
        per_class_f1=per_class,
        fold_means={fold: sum(v) / len(v) for fold, v in sorted(fold_scores.items())},
        keyword_f1=keywords,
        trials=records,
    )
    logger.info(
        f"[Experiment] method={config.method.value} bytes={config.byte_mode.value} "
        f"kind={config.kind} fraction={config.fraction}: "
        f"f1={report.unbiased_f1_mean:.4f} +/- {report.ci_halfwidth:.4f} over {len(records)} trials"
    )
    return report


def run_experiment(
    splits: Sequence[Sequence[RawClientHello]],
    config: ExperimentConfig,
    repo: LabelRepository,
) -> EvalReport:
    """Cross-validate one configuration over corpus splits.

    Args:
        splits: k >= 2 ordered corpus partitions.
        config: Method, byte mode, perturbation and trial count.
        repo: JA3 repository supplying truth labels and the JA3 classifier.

    Raises:
        InsufficientSplits: Fewer than two splits.
        NoLabeledData: No hello resolves to a known label.
    """
    return ExperimentRunner.from_splits(splits, repo).run(config)


def run_sweep(
    splits: Sequence[Sequence[RawClientHello]],
    base: ExperimentConfig,
    fractions: Sequence[float],
    methods: Sequence[Method],
    repo: LabelRepository,
    rng_seed: int = 0,
) -> List[EvalReport]:
    """Random fraction permutation sweep: one report per (method, fraction)."""
    runner = ExperimentRunner.from_splits(splits, repo)
    reports = []
    for method in methods:
        for fraction in fractions:
            spec = PerturbationSpec(kind=PerturbationKind.FRACTION, fraction=fraction, rng_seed=rng_seed)
            reports.append(runner.run(base.model_copy(update={"method": method, "perturbation": spec})))
    return reports
