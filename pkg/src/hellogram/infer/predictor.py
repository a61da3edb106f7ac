"""
Maximum mean-log-likelihood classification.

Each model scores an input by the average natural-log probability of its bytes
over the first K = min(len(x), m) positions. The label with the highest score
wins; equal scores resolve to the lexicographically smallest label.
"""

import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from hellogram.core.errors import EmptyInput, HellogramError, NoModels
from hellogram.infer.instrument import record_cell_reads
from hellogram.pum.matrix import PumModel
from hellogram.pum.modelset import ModelSet
from hellogram.wire.scrub import FeatureBytes

logger = logging.getLogger(__name__)


class Prediction(BaseModel):
    """Winning label and its score in nats per byte."""

    label: str
    score: float
    per_label_scores: Optional[Dict[str, float]] = None
    source_id: str = ""

    @model_validator(mode="after")
    def validate_scores(self) -> "Prediction":
        if self.per_label_scores is not None:
            if self.per_label_scores.get(self.label) != self.score:
                raise ValueError("score must equal the winning label's entry in per_label_scores")
            if self.score < max(self.per_label_scores.values()):
                raise ValueError("score must be the maximum of per_label_scores")
        return self


class PredictionFailure(BaseModel):
    """A batch element that could not be classified."""

    index: int = Field(..., ge=0)
    code: str
    message: str
    source_id: str = ""


def mean_log_likelihood(model: PumModel, x: FeatureBytes) -> float:
    """Average log-probability of x under a model.

    Reads exactly K = min(len(x), model.m) cells of the log-probability matrix.

    Raises:
        EmptyInput: x has no bytes.
    """
    if len(x) == 0:
        raise EmptyInput("cannot score an empty byte sequence", details={"source_id": x.source_id})
    k = min(len(x), model.m)
    values = np.frombuffer(x.data, dtype=np.uint8, count=k)
    cells = model.log_probs[np.arange(k), values]
    record_cell_reads(k)
    return float(cells.sum() / k)


def predict(models: ModelSet, x: FeatureBytes, with_scores: bool = False) -> Prediction:
    """Return the label whose model maximizes the mean log-likelihood of x.

    Args:
        models: Hypothesis set.
        x: Featurized ClientHello, in the set's byte mode.
        with_scores: Attach every label's score to the prediction.

    Raises:
        NoModels: The set is empty.
        EmptyInput: x has no bytes.
    """
    candidates = models.models()
    if not candidates:
        raise NoModels("the model set is empty")
    if len(x) == 0:
        raise EmptyInput("cannot score an empty byte sequence", details={"source_id": x.source_id})

    best_label = ""
    best_score = -np.inf
    scores: Optional[Dict[str, float]] = {} if with_scores else None
    # Labels arrive sorted; strict comparison keeps the smallest label on ties.
    for model in candidates:
        score = mean_log_likelihood(model, x)
        if scores is not None:
            scores[model.label] = score
        if score > best_score:
            best_label, best_score = model.label, score

    return Prediction(
        label=best_label,
        score=float(best_score),
        per_label_scores=scores,
        source_id=x.source_id,
    )


def predict_batch(
    models: ModelSet, xs: Sequence[FeatureBytes], with_scores: bool = False
) -> List[Union[Prediction, PredictionFailure]]:
    """Predict every element; failures are reported in place without aborting."""
    results: List[Union[Prediction, PredictionFailure]] = []
    for index, x in enumerate(xs):
        try:
            results.append(predict(models, x, with_scores=with_scores))
        except HellogramError as e:
            logger.warning(f"[Predictor] Element {index} failed: {e.message}")
            results.append(
                PredictionFailure(index=index, code=e.code, message=e.message, source_id=x.source_id)
            )
    return results
